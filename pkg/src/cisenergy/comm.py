"""Link energy for data leaving the sensor or crossing stacked layers."""
import math
from decimal import Decimal
from dataclasses import dataclass, field

from .ir.hardware import LinkKind

MIPI_ENERGY_PER_BYTE = 100e-12  # J/B, typical CSI-2 transmitter
UTSV_ENERGY_PER_BYTE = 1e-12  # J/B, micro through-silicon via


def output_bytes(stage, bit_depth=8):
    bits = stage.bit_depth or bit_depth
    return math.ceil(stage.shape.output_elements * bits / 8)


def link_traffic(graph, mapping, bit_depth=8):
    """Bytes per link per frame: output bytes of every stage assigned to it."""
    traffic = {}
    for stage, links in mapping.links:
        if stage not in graph:
            continue
        for l in links:
            traffic[l] = traffic.get(l, 0) + output_bytes(graph[stage], bit_depth)
    return traffic


@dataclass
class LinkEnergy:
    name: str
    kind: str
    bytes: int
    energy_per_byte: float

    @property
    def energy(self):
        # decimal product keeps "6e6 B at 100 pJ/B" at exactly 0.6 mJ
        return float(Decimal(repr(self.energy_per_byte)) * self.bytes)


@dataclass
class CommEnergyBreakdown:
    links: dict = field(default_factory=dict)

    def _kind_total(self, kind, attr):
        return sum(getattr(l, attr) for l in self.links.values() if l.kind == kind)

    @property
    def mipi_bytes(self):
        return self._kind_total(LinkKind.MIPI.value, "bytes")

    @property
    def tsv_bytes(self):
        return self._kind_total(LinkKind.UTSV.value, "bytes")

    @property
    def mipi_energy(self):
        return self._kind_total(LinkKind.MIPI.value, "energy")

    @property
    def tsv_energy(self):
        return self._kind_total(LinkKind.UTSV.value, "energy")

    @property
    def total(self):
        return sum(l.energy for l in self.links.values())


def comm_frame_energy(links, traffic):
    """Energy of every declared link that carries traffic this frame."""
    out = CommEnergyBreakdown()
    for link in links:
        if link.name in traffic:
            out.links[link.name] = LinkEnergy(link.name, link.kind.value, traffic[link.name], link.energy_per_byte)
    return out
