"""Digital compute and memory energy per frame."""
from dataclasses import dataclass, field


class UnknownNode(KeyError):
    pass


def compute_unit_energy(energy_per_cycle, cycles):
    if energy_per_cycle < 0 or cycles < 0:
        raise ValueError("energy per cycle and cycle count must be >= 0")
    return energy_per_cycle * cycles


def memory_energy(spec, reads, writes, frame_rate, alpha=None):
    """Dynamic access energy plus leakage over the active fraction of the frame."""
    dynamic, leakage = memory_energy_terms(spec, reads, writes, frame_rate, alpha)
    return dynamic + leakage


def memory_energy_terms(spec, reads, writes, frame_rate, alpha=None):
    if alpha is None:
        alpha = spec.active_fraction if spec.active_fraction is not None else 0.0
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("active fraction must lie in [0, 1]")
    dynamic = reads * spec.read_energy + writes * spec.write_energy
    leakage = spec.leakage_power * (1.0 / frame_rate) * alpha
    return dynamic, leakage


def _node_key(node, table):
    for k in table:
        if abs(k - node) <= 1e-6 * max(abs(k), abs(node)):
            return k
    raise UnknownNode(f"process node {node:g} is not in the scaling table")


def scale_energy_across_nodes(energy, from_node, to_node, scaling_table):
    """Rescale a per-operation energy by the ratio of the table's node factors."""
    f_from = scaling_table[_node_key(from_node, scaling_table)]
    f_to = scaling_table[_node_key(to_node, scaling_table)]
    return energy * f_to / f_from


@dataclass
class MemoryEnergy:
    name: str
    reads: int
    writes: int
    alpha: float
    dynamic: float
    leakage: float

    @property
    def energy(self):
        return self.dynamic + self.leakage


@dataclass
class UnitEnergy:
    name: str
    cycles: int
    energy_per_cycle: float

    @property
    def energy(self):
        return compute_unit_energy(self.energy_per_cycle, self.cycles)


@dataclass
class DigitalEnergyBreakdown:
    units: dict = field(default_factory=dict)
    memories: dict = field(default_factory=dict)

    @property
    def compute_total(self):
        return sum(u.energy for u in self.units.values())

    @property
    def memory_total(self):
        return sum(m.energy for m in self.memories.values())

    @property
    def total(self):
        return self.compute_total + self.memory_total


def digital_frame_energy(hw, timing):
    """Compute energy from simulated cycles; memory energy from simulated accesses.

    Memories that carry no data this frame are treated as power-gated.
    """
    out = DigitalEnergyBreakdown()
    fps = 1.0 / timing.frame_time
    for u in hw.digital_units:
        if u.name in timing.unit_cycles:
            out.units[u.name] = UnitEnergy(u.name, timing.unit_cycles[u.name], u.energy_per_cycle)
    for m in hw.memories:
        if m.name not in timing.writes:
            continue
        reads, writes = timing.reads.get(m.name, 0), timing.writes[m.name]
        alpha = m.active_fraction if m.active_fraction is not None else timing.alpha(m.name)
        dyn, leak = memory_energy_terms(m, reads, writes, fps, alpha)
        out.memories[m.name] = MemoryEnergy(m.name, reads, writes, alpha, dyn, leak)
    return out
