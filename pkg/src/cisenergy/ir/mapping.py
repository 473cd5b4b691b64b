"""Stage to hardware-unit assignment."""
from dataclasses import dataclass


@dataclass(frozen=True)
class MappingTable:
    entries: tuple = ()  # (stage, unit) pairs
    links: tuple = ()  # (stage, (link, ...)) pairs

    @classmethod
    def from_dicts(cls, entries, links=None):
        links = links or {}
        return cls(
            tuple((str(k), str(v)) for k, v in entries.items()),
            tuple((str(k), tuple(v)) for k, v in links.items()),
        )

    def unit_of(self, stage):
        for s, u in self.entries:
            if s == stage:
                return u
        return None

    def links_of(self, stage):
        for s, ls in self.links:
            if s == stage:
                return ls
        return ()

    def stages_on(self, unit):
        return [s for s, u in self.entries if u == unit]

    def as_dict(self):
        return dict(self.entries)

    @property
    def units(self):
        seen = []
        for _, u in self.entries:
            if u not in seen:
                seen.append(u)
        return seen
