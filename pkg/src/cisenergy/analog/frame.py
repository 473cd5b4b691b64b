"""Aggregation of cell energies into component, array and frame energies."""
from dataclasses import dataclass, field

from ..ir.hardware import CellClass
from ..ir.topology import analog_ops, resolve_routes
from ..timing.delay import allocate_cell_delays, static_windows
from .cells import (
    DEFAULT_TEMPERATURE,
    bias_current_gm_id,
    capacitance_for_sigma,
    cell_access_count,
    component_access_count,
    energy_dynamic_cell,
    energy_nonlinear_cell,
    energy_static_biased,
    energy_static_direct,
    noise_sigma_max,
)


@dataclass
class CellEnergy:
    name: str
    cell_class: str
    accesses: int
    energy_per_use: float
    delay: float

    @property
    def energy(self):
        return self.energy_per_use * self.accesses


@dataclass
class ComponentEnergy:
    name: str
    kind: str
    num_component: int
    accesses: int  # per component, per frame
    energy_per_access: float
    access_delay: float
    cells: list = field(default_factory=list)

    @property
    def energy(self):
        return self.num_component * self.energy_per_access * self.accesses


@dataclass
class ArrayEnergy:
    name: str
    ops: int
    components: list = field(default_factory=list)

    @property
    def energy(self):
        return sum(c.energy for c in self.components)


@dataclass
class AnalogEnergyBreakdown:
    arrays: dict = field(default_factory=dict)
    stage_delay: float = 0.0

    @property
    def total(self):
        return sum(a.energy for a in self.arrays.values())


def node_capacitance(node, temperature=DEFAULT_TEMPERATURE):
    if node.capacitance is not None:
        return node.capacitance
    sigma = node.noise_sigma or noise_sigma_max(node.voltage_swing, node.resolution_bits)
    return capacitance_for_sigma(sigma, temperature)


def cell_energy(cell, delay, t_static, temperature=DEFAULT_TEMPERATURE):
    """Energy of one use of `cell` given its delay slot and its biased time."""
    cls = cell.cell_class
    if cls is CellClass.DYNAMIC:
        return energy_dynamic_cell((node_capacitance(n, temperature), n.voltage_swing) for n in cell.nodes)
    if cls is CellClass.STATIC_DIRECT:
        return energy_static_direct(cell.load_capacitance, cell.voltage_swing, cell.supply)
    if cls is CellClass.STATIC_GMID:
        # bandwidth is the reciprocal of the cell delay
        gbw = cell.gain / delay
        current = bias_current_gm_id(cell.load_capacitance, gbw, cell.gm_over_id)
        return energy_static_biased(cell.supply, current, t_static)
    return energy_nonlinear_cell(cell.fom_table, 1.0 / delay, 1)


def component_energy_detail(component, access_delay, temperature=DEFAULT_TEMPERATURE):
    delays = allocate_cell_delays(access_delay, component)
    windows = static_windows(access_delay, delays)
    cells = []
    for cell, t, ts in zip(component.cells, delays, windows):
        cells.append(CellEnergy(
            name=cell.name,
            cell_class=cell.cell_class.value,
            accesses=cell_access_count(cell.spatial_count, cell.temporal_count),
            energy_per_use=cell_energy(cell, t, ts, temperature),
            delay=t,
        ))
    return sum(c.energy for c in cells), cells


def component_energy(component, access_delay, temperature=DEFAULT_TEMPERATURE):
    """Energy of one component access: cell energies weighted by their access counts."""
    return component_energy_detail(component, access_delay, temperature)[0]


def array_energy(array, ops, stage_delay, temperature=DEFAULT_TEMPERATURE):
    out = ArrayEnergy(array.name, ops)
    if ops == 0:
        return out
    for comp, n in array.components:
        accesses = component_access_count(ops, n)
        # the stage budget is shared by every access the component makes in a frame
        access_delay = stage_delay / accesses
        e, cells = component_energy_detail(comp, access_delay, temperature)
        out.components.append(ComponentEnergy(comp.name, comp.kind.value, n, accesses, e, access_delay, cells))
    return out


def analog_frame_energy(hw, mapping, graph, timing, temperature=DEFAULT_TEMPERATURE, ops=None):
    if ops is None:
        routes, _ = resolve_routes(graph, hw, mapping)
        ops = analog_ops(graph, hw, mapping, routes)
    out = AnalogEnergyBreakdown(stage_delay=timing.analog_stage_delay)
    for array in hw.analog_arrays:
        out.arrays[array.name] = array_energy(array, ops.get(array.name, 0), timing.analog_stage_delay, temperature)
    return out
