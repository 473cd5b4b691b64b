"""Brute-force reference counts for small designs.

Nothing here uses a closed form. Windows are found by sliding the kernel
over the input, operations are dealt to components one at a time, memory
traffic is tallied element by element, and the digital pipeline is replayed
cycle by cycle with explicit per-element timestamps. The analytical paths in
`ir`, `analog`, and `timing` are checked against these numbers.
"""
from dataclasses import dataclass, field

from .ir.graph import StageKind, topological_order
from .ir.hardware import AnalogArraySpec, DigitalUnitSpec
from .ir.topology import is_analog_stage, resolve_routes, route_memory

MAX_PIXELS = 1 << 16


class TooLarge(ValueError):
    pass


@dataclass
class OracleTrace:
    stage_windows: dict = field(default_factory=dict)
    stage_ops: dict = field(default_factory=dict)
    afa_ops: dict = field(default_factory=dict)
    afa_accesses: dict = field(default_factory=dict)  # array -> component -> busiest copy's activations
    memory_reads: dict = field(default_factory=dict)
    memory_writes: dict = field(default_factory=dict)
    unit_cycles: dict = field(default_factory=dict)
    events: list = field(default_factory=list)  # (cycle, unit, what, count)


def enumerate_windows(shape):
    """Top-left corners of every window that fits inside the input."""
    (ih, iw, _), (kh, kw), (sh, sw) = shape.input_size, shape.kernel, shape.stride
    out = []
    y = 0
    while y + kh <= ih:
        x = 0
        while x + kw <= iw:
            out.append((y, x))
            x += sw
        y += sh
    return out


def window_elements(shape, corner):
    """Raster indices of the elements a window reads, one per kernel tap and channel."""
    (_, iw, c), (kh, kw) = shape.input_size, shape.kernel
    y0, x0 = corner
    return [((y0 + dy) * iw + (x0 + dx)) * c + ch for dy in range(kh) for dx in range(kw) for ch in range(c)]


def _stage_windows(stage):
    if stage.kind is StageKind.PIXEL_INPUT:
        return []
    if stage.kind is StageKind.DNN_LAYER_LIST:
        return [(0, 0)]
    return enumerate_windows(stage.shape)


def _stage_ops(stage, windows):
    if stage.kind is StageKind.PIXEL_INPUT:
        return 0
    if stage.kind is StageKind.DNN_LAYER_LIST:
        total = 0
        for layer in stage.layers:
            h, w, c = layer.output
            for _ in range(h * w * c):
                total += layer.macs_per_output
        return total
    total = 0
    for _ in windows:
        for _ in range(stage.shape.output_size[2]):
            total += stage.ops_per_window
    return total


def _count_elements(stage):
    n = 0
    h, w, c = stage.shape.output_size
    for _ in range(h):
        for _ in range(w):
            for _ in range(c):
                n += 1
    return n


def round_robin(ops, copies):
    """Deal `ops` operations to `copies` components in turn; return each copy's tally."""
    tally = [0] * copies
    for k in range(ops):
        tally[k % copies] += 1
    return tally


def brute_force_counts(graph, hw, mapping, replay_cycles=False):
    for st in graph:
        h, w, _ = st.shape.input_size
        if h * w > MAX_PIXELS:
            raise TooLarge(f"stage {st.name!r} has {h * w} pixels; the oracle stops at {MAX_PIXELS}")
    trace = OracleTrace()
    routes, _ = resolve_routes(graph, hw, mapping)
    for st in graph:
        wins = _stage_windows(st)
        trace.stage_windows[st.name] = len(wins)
        trace.stage_ops[st.name] = _stage_ops(st, wins)

    # analog arrays: own stages, pixel senses, and data passing through
    ops = {a.name: 0 for a in hw.analog_arrays}
    for st in graph:
        u = mapping.unit_of(st.name)
        if u in ops:
            ops[u] += _count_elements(st) if st.kind is StageKind.PIXEL_INPUT else trace.stage_ops[st.name]
    passed = set()
    for (p, _), route in routes.items():
        for hop in route.path[1:-1]:
            if hop in ops and (p, hop) not in passed:
                passed.add((p, hop))
                ops[hop] += _count_elements(graph[p])
    trace.afa_ops = ops
    for a in hw.analog_arrays:
        trace.afa_accesses[a.name] = {
            comp.name: (max(round_robin(ops[a.name], n)) if ops[a.name] else 0) for comp, n in a.components
        }

    # memory traffic, one element at a time
    reads, writes, stored = {}, {}, set()
    for c in topological_order(graph):
        if is_analog_stage(hw, mapping, c):
            continue
        st = graph[c]
        for j, p in enumerate(st.predecessors):
            route = routes.get((p, c))
            m = route_memory(hw, route) if route else None
            if m is None:
                continue
            reads.setdefault(m, 0)
            writes.setdefault(m, 0)
            if (p, m) not in stored:
                stored.add((p, m))
                writes[m] += _count_elements(graph[p])
            if st.kind is StageKind.STENCIL and j == 0:
                for corner in enumerate_windows(st.shape):
                    reads[m] += len(window_elements(st.shape, corner))
            elif st.kind is StageKind.ELEMENTWISE_BINARY:
                for _ in range(_count_elements(graph[p])):
                    reads[m] += 2 if st.is_temporal else 1
            else:
                reads[m] += _count_elements(graph[p])
    trace.memory_reads, trace.memory_writes = reads, writes
    if replay_cycles:
        trace.unit_cycles, trace.events = replay(graph, hw, mapping, routes)
    return trace


def _window_needs(stage, j, n_in):
    """Last input element each window needs from predecessor j, found by listing the window's elements."""
    if stage.kind is StageKind.STENCIL:
        if j > 0:
            return [n_in - 1] * len(enumerate_windows(stage.shape))
        return [max(window_elements(stage.shape, corner)) for corner in enumerate_windows(stage.shape)]
    if stage.kind is StageKind.ELEMENTWISE_BINARY:
        c = stage.shape.input_size[2]
        return [(k + 1) * c - 1 for k in range(n_in // c)]
    return [n_in - 1]


def replay(graph, hw, mapping, routes=None, max_cycles=10_000_000):
    """Cycle-by-cycle replay with unbounded memories and ports.

    Supports designs where every digital unit runs one stage and all units
    share one clock. Returns (unit cycles, event list).
    """
    if routes is None:
        routes, _ = resolve_routes(graph, hw, mapping)
    order = topological_order(graph)
    digital = [n for n in order if isinstance(hw.get(mapping.unit_of(n)), DigitalUnitSpec)]
    units = [mapping.unit_of(n) for n in digital]
    if len(set(units)) != len(units):
        raise ValueError("replay supports one stage per digital unit")
    clocks = {hw[u].clock for u in units}
    if len(clocks) > 1:
        raise ValueError("replay supports a single clock domain")

    # when each element of each producer becomes readable by each consumer
    visible_at = {}
    for c in digital:
        for p in graph[c].predecessors:
            route = routes[(p, c)]
            n = graph[p].shape.output_elements
            if isinstance(hw[mapping.unit_of(p)], AnalogArraySpec):
                arrays = [u for u in route.path if isinstance(hw[u], AnalogArraySpec)]
                rate = hw[arrays[-1]].output_rate
                delay = 2 if route_memory(hw, route) else 1
                visible_at[(p, c)] = [e // rate + delay for e in range(n)]
            else:
                visible_at[(p, c)] = [None] * n

    state = {}
    for c in digital:
        st = graph[c]
        unit = hw[mapping.unit_of(c)]
        needs = [_window_needs(st, j, graph[p].shape.output_elements) for j, p in enumerate(st.predecessors)]
        if st.kind is StageKind.DNN_LAYER_LIST:
            macs = sum(l.macs for l in st.layers)
            busy_for = max(1, -(-macs // unit.macs_per_cycle))
            win_out = st.shape.output_elements
        else:
            busy_for = 0
            win_out = st.shape.output_size[2]
        state[c] = dict(needs=needs, taken=[0] * len(needs), w=0, pending=0, busy=0, busy_for=busy_for,
                        win_out=win_out, pipe=[], produced=0, last=0, unit=unit)

    events = []
    t = 0
    while any(s["w"] < len(s["needs"][0]) or s["pending"] or s["pipe"] for s in state.values()):
        t += 1
        if t > max_cycles:
            raise RuntimeError("replay did not finish")
        for c in digital:
            s, unit, st = state[c], state[c]["unit"], graph[c]
            if s["busy"] > 0:
                s["busy"] -= 1
            nwin = len(s["needs"][0])
            if s["busy"] == 0 and s["w"] < nwin:
                w = s["w"]
                lacking = [j for j in range(len(s["needs"])) if s["taken"][j] <= s["needs"][j][w]]
                for j in lacking:
                    times = visible_at[(st.predecessors[j], c)]
                    got = 0
                    while got < unit.in_rate and s["taken"][j] < len(times):
                        ts = times[s["taken"][j]]
                        if ts is None or ts > t:
                            break
                        s["taken"][j] += 1
                        got += 1
                    if got:
                        events.append((t, unit.name, "ingest", got))
                cap = max(unit.out_rate, s["win_out"])
                while s["w"] < nwin and s["pending"] + s["win_out"] <= cap:
                    w = s["w"]
                    if any(s["taken"][j] <= s["needs"][j][w] for j in range(len(s["needs"]))):
                        break
                    s["pending"] += s["win_out"]
                    s["w"] += 1
                    events.append((t, unit.name, "window", w))
                    if s["busy_for"]:
                        s["busy"] = s["busy_for"]
                        break
            if s["busy"] == 0 and s["pending"]:
                k = min(unit.out_rate, s["pending"])
                s["pending"] -= k
                s["pipe"].append([t + unit.num_stages - 1, k])
            while s["pipe"] and s["pipe"][0][0] <= t:
                _, k = s["pipe"].pop(0)
                for e in range(s["produced"], s["produced"] + k):
                    for (p, cc), times in visible_at.items():
                        if p == c:
                            times[e] = t + 1
                s["produced"] += k
                s["last"] = t
                events.append((t, unit.name, "output", k))
    return {mapping.unit_of(c): state[c]["last"] for c in digital}, events


def verify(design, sim=None):
    """Compare analytical and simulated counts against the oracle; returns divergences as text."""
    from .analog.cells import component_access_count
    from .ir.graph import stage_op_count
    from .ir.topology import analog_ops
    from .timing.simulate import memory_access_counts, simulate_digital

    graph, hw, mapping, g = design
    trace = brute_force_counts(graph, hw, mapping)
    routes, _ = resolve_routes(graph, hw, mapping)
    problems = []
    for st in graph:
        a = stage_op_count(st)
        if a != trace.stage_ops[st.name]:
            problems.append(f"ops of {st.name}: analytical {a}, oracle {trace.stage_ops[st.name]}")
    ops = analog_ops(graph, hw, mapping, routes)
    for arr in hw.analog_arrays:
        for comp, n in arr.components:
            a = component_access_count(ops[arr.name], n)
            o = trace.afa_accesses[arr.name][comp.name]
            if a != o:
                problems.append(f"accesses of {arr.name}.{comp.name}: analytical {a}, oracle {o}")
    reads, writes = memory_access_counts(graph, hw, mapping, routes)
    if sim is None:
        sim = simulate_digital(graph, hw, mapping, g.bit_depth, routes=routes)
    for m in sorted(set(reads) | set(trace.memory_reads)):
        triple = (reads.get(m, 0), sim.reads.get(m, 0), trace.memory_reads.get(m, 0))
        if len(set(triple)) > 1:
            problems.append(f"reads of {m}: analytical {triple[0]}, simulated {triple[1]}, oracle {triple[2]}")
        triple = (writes.get(m, 0), sim.writes.get(m, 0), trace.memory_writes.get(m, 0))
        if len(set(triple)) > 1:
            problems.append(f"writes of {m}: analytical {triple[0]}, simulated {triple[1]}, oracle {triple[2]}")
    return problems
