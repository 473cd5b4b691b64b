"""Digital pipeline simulation and the per-frame timing summary.

The kernel is picked at import: the compiled extension when it was built,
otherwise the pure-Python twin. Set CISENERGY_PURE_PYTHON=1 to force the
fallback.
"""
import os
from dataclasses import dataclass, field
from typing import Optional

from ..analog.cells import component_access_count
from ..ir.graph import StageKind, topological_order
from ..ir.topology import (
    analog_chain_length,
    analog_ops,
    first_digital_consumer,
    has_multirow_prologue,
    is_analog_stage,
    resolve_routes,
    route_memory,
)
from . import _kernel_py
from .delay import allocate_analog_delay, allocate_cell_delays
from .program import CAUSES, build_program

try:
    if os.environ.get("CISENERGY_PURE_PYTHON"):
        raise ImportError("pure Python kernel requested")
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _kernel_py.run}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.run
DEFAULT_BACKEND = "cython" if _compiled is not None else "python"


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class StallCause:
    cause: str
    unit: str
    cycle: int
    memory: Optional[str] = None
    detail: str = ""

    def to_dict(self):
        return {"cause": self.cause, "unit": self.unit, "cycle": self.cycle, "memory": self.memory, "detail": self.detail}


@dataclass
class SimulationResult:
    base_clock: int
    unit_cycles: dict
    last_cycle: int
    reads: dict
    writes: dict
    busy_cycles: dict
    stalls: list
    footprints: dict = field(default_factory=dict)
    capacities: dict = field(default_factory=dict)
    backend: str = DEFAULT_BACKEND

    @property
    def digital_latency(self):
        return self.last_cycle / self.base_clock if self.last_cycle else 0.0


def simulate_digital(graph, hw, mapping, bit_depth=8, backend=None, routes=None):
    """Cycle-level run of every digital unit over one frame."""
    backend = backend or DEFAULT_BACKEND
    prog = build_program(graph, hw, mapping, bit_depth, routes)
    raw = BACKENDS[backend](prog.arrays, prog.base_clock, prog.max_cycles, prog.patience)
    if raw["status"] == 1:
        raise SimulationError("digital pipeline deadlocked with no memory left to widen")
    if raw["status"] == 2:
        raise SimulationError(f"digital pipeline did not finish within {prog.max_cycles} cycles")
    unit_f = prog.arrays["unit_f"]
    cycles = {
        name: int(raw["unit_last"][u]) * int(unit_f[u]) // prog.base_clock
        for u, name in enumerate(prog.unit_names)
    }
    mems = prog.memory_names
    stalls = []
    for st in prog.static_stalls:
        m = mems.index(st["memory"])
        stalls.append(StallCause(st["cause"], st["unit"], int(raw["mem_overcap"][m]), st["memory"], st["detail"]))
    n_units, n_streams = len(prog.unit_names), len(prog.streams)
    for cause, actor, m, t in raw["events"].tolist():
        mem = mems[m] if m >= 0 else None
        if actor < n_units:
            unit = prog.unit_names[actor]
            what = "blocked writing" if cause == 1 else "denied a port on"
            detail = f"{unit} {what} {mem}"
        elif actor < n_units + n_streams:
            s = prog.streams[actor - n_units]
            unit = mapping.unit_of(s.producer)
            detail = f"readout of {s.producer!r} denied a port on {mem}"
        else:
            if any(x.cause == "ProducerNotReady" and x.memory == mem for x in stalls):
                continue
            unit = mem
            detail = f"{mem} filled before its consumers could assemble a window"
        stalls.append(StallCause(CAUSES[cause], unit, int(t), mem, detail))
    stalls.sort(key=lambda x: (x.cycle, x.cause, x.unit, x.memory or ""))
    return SimulationResult(
        base_clock=prog.base_clock,
        unit_cycles=cycles,
        last_cycle=int(raw["unit_last"].max()) if n_units else 0,
        reads={m: int(raw["mem_reads"][i]) for i, m in enumerate(mems)},
        writes={m: int(raw["mem_writes"][i]) for i, m in enumerate(mems)},
        busy_cycles={m: int(raw["mem_busy"][i]) for i, m in enumerate(mems)},
        stalls=stalls,
        footprints=dict(prog.footprints),
        capacities=dict(prog.capacity),
        backend=backend,
    )


def detect_stalls(result):
    """Stall causes found during simulation; empty when the pipeline never stalls."""
    return list(result.stalls)


def memory_access_counts(graph, hw, mapping, routes=None):
    """Closed-form per-memory read and write counts for one frame."""
    if routes is None:
        routes, _ = resolve_routes(graph, hw, mapping)
    reads, writes, seen = {}, {}, set()
    for c in topological_order(graph):
        if is_analog_stage(hw, mapping, c):
            continue
        st = graph[c]
        for j, p in enumerate(st.predecessors):
            m = route_memory(hw, routes[(p, c)])
            if m is None:
                continue
            n_in = graph[p].shape.output_elements
            if (p, m) not in seen:
                seen.add((p, m))
                writes[m] = writes.get(m, 0) + n_in
            reads.setdefault(m, 0)
            if st.kind is StageKind.STENCIL and j == 0:
                kh, kw = st.shape.kernel
                reads[m] += st.shape.num_windows * kh * kw * st.shape.input_size[2]
            elif st.kind is StageKind.ELEMENTWISE_BINARY:
                per = 2 if st.is_temporal else 1
                reads[m] += n_in * per
            else:
                reads[m] += n_in
    for m in writes:
        reads.setdefault(m, 0)
    return reads, writes


def analog_slot_count(graph, hw, mapping, ops):
    """Analog pipeline slots: busy arrays on the longest chain, plus one when the
    first digital consumer waits for more than one row before it can start."""
    n = analog_chain_length(hw, ops)
    first = first_digital_consumer(graph, hw, mapping, topological_order(graph))
    if first is not None and has_multirow_prologue(first):
        n += 1
    return max(n, 1)


@dataclass
class TimingResult:
    frame_time: float
    digital_latency: float
    unit_cycles: dict
    analog_stage_delay: float
    analog_slots: int
    cell_delays: dict  # (array, component) -> per-access cell delays
    stalls: list
    reads: dict
    writes: dict
    busy_cycles: dict
    base_clock: int

    @property
    def stall_free(self):
        return not self.stalls

    def alpha(self, memory):
        """Default active fraction: busy cycles over the cycles in one frame."""
        frame_cycles = self.frame_time * self.base_clock
        if frame_cycles <= 0:
            return 0.0
        return min(1.0, self.busy_cycles.get(memory, 0) / frame_cycles)


def compute_timing(graph, hw, mapping, fps, bit_depth=8, backend=None, routes=None, ops=None):
    if routes is None:
        routes, _ = resolve_routes(graph, hw, mapping)
    if ops is None:
        ops = analog_ops(graph, hw, mapping, routes)
    sim = simulate_digital(graph, hw, mapping, bit_depth, backend, routes)
    t_fr = 1.0 / fps
    slots = analog_slot_count(graph, hw, mapping, ops)
    t_a = allocate_analog_delay(t_fr, sim.digital_latency, slots)
    cell_delays = {}
    for array in hw.analog_arrays:
        if not ops.get(array.name):
            continue
        for comp, n in array.components:
            per_access = t_a / component_access_count(ops[array.name], n)
            cell_delays[(array.name, comp.name)] = allocate_cell_delays(per_access, comp)
    return TimingResult(
        frame_time=t_fr,
        digital_latency=sim.digital_latency,
        unit_cycles=sim.unit_cycles,
        analog_stage_delay=t_a,
        analog_slots=slots,
        cell_delays=cell_delays,
        stalls=sim.stalls,
        reads=sim.reads,
        writes=sim.writes,
        busy_cycles=sim.busy_cycles,
        base_clock=sim.base_clock,
    )
