"""Resolution of algorithm edges onto hardware data paths.

Every hardware unit names the units it receives data from (`source`). An
algorithm edge P -> C travels along the shortest such path from the unit
running P to the unit running C. Analog arrays sitting in between (an ADC
bank, a sample-and-hold row) process the data in passing and are charged
one operation per element.
"""
from collections import deque
from dataclasses import dataclass

from .graph import StageKind, analog_op_count
from .hardware import AnalogArraySpec, DigitalUnitSpec, MemorySpec


@dataclass(frozen=True)
class Route:
    producer: str
    consumer: str
    path: tuple  # unit names from producer unit to consumer unit, inclusive

    @property
    def hops(self):
        return self.path[1:-1]


@dataclass(frozen=True)
class RouteProblem:
    rule: str
    producer: str
    consumer: str
    message: str
    fix: str


def downstream(hw, name):
    """Units that list `name` as a source, in declaration order."""
    return [u.name for u in hw.units if name in u.source]


def find_path(hw, src, dst):
    """Shortest unit path src -> dst. Only the endpoints may be digital units."""
    if src == dst:
        if isinstance(hw[src], DigitalUnitSpec):
            # a unit feeding itself needs a loop memory
            for m in downstream(hw, src):
                if isinstance(hw[m], MemorySpec) and m in hw[src].source:
                    return (src, m, src)
            return None
        return (src,)
    prev = {src: None}
    queue = deque([src])
    while queue:
        n = queue.popleft()
        for nxt in downstream(hw, n):
            if nxt in prev:
                continue
            prev[nxt] = n
            if nxt == dst:
                path = [dst]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return tuple(reversed(path))
            if not isinstance(hw[nxt], DigitalUnitSpec):
                queue.append(nxt)
    return None


def _check_route(graph, hw, route):
    p, c = route.producer, route.consumer
    units = [hw[u] for u in route.path]
    problems = []
    seen_digital = False
    for u in units:
        if isinstance(u, AnalogArraySpec) and seen_digital:
            problems.append(RouteProblem(
                "DigitalToAnalog", p, c,
                f"data of {p!r} flows from digital hardware back into analog array {u.name!r}",
                "map the consumer to a digital unit or move the producer into the analog domain",
            ))
            break
        if not isinstance(u, AnalogArraySpec):
            seen_digital = True
    consumer_unit = units[-1]
    if isinstance(consumer_unit, DigitalUnitSpec):
        mems = [u.name for u in units if isinstance(u, MemorySpec)]
        if len(mems) > 1:
            problems.append(RouteProblem(
                "MultipleMemories", p, c,
                f"path {' -> '.join(route.path)} passes through {len(mems)} memories",
                "let one memory sit between producer and consumer",
            ))
        if not mems and isinstance(units[0], DigitalUnitSpec):
            problems.append(RouteProblem(
                "MissingMemory", p, c,
                f"digital units {units[0].name!r} and {consumer_unit.name!r} have no memory in between",
                f"insert a FIFO or line buffer between {units[0].name!r} and {consumer_unit.name!r}",
            ))
        if not mems and graph[c].is_temporal:
            problems.append(RouteProblem(
                "MissingMemory", p, c,
                f"{c!r} subtracts the previous frame but its input path holds no memory",
                "add a frame buffer on the path",
            ))
    return problems


def resolve_routes(graph, hw, mapping):
    """Route every algorithm edge whose endpoints are mapped to known units.

    Returns (routes keyed by (producer, consumer), problems).
    """
    routes, problems = {}, []
    for p, c in graph.edges:
        up, uc = mapping.unit_of(p), mapping.unit_of(c)
        if up not in hw or uc not in hw:
            continue
        if isinstance(hw[up], MemorySpec) or isinstance(hw[uc], MemorySpec):
            continue
        path = find_path(hw, up, uc)
        if path is None:
            problems.append(RouteProblem(
                "NoHardwarePath", p, c,
                f"no data path from {up!r} to {uc!r}",
                f"list {up!r} (or a unit it feeds) as a source of {uc!r}",
            ))
            continue
        route = Route(p, c, path)
        problems.extend(_check_route(graph, hw, route))
        routes[(p, c)] = route
    return routes, problems


def analog_ops(graph, hw, mapping, routes):
    """Operations per analog array: its own stages plus elements passing through it."""
    ops = {a.name: 0 for a in hw.analog_arrays}
    for stage in graph:
        u = mapping.unit_of(stage.name)
        if u in ops:
            ops[u] += analog_op_count(stage)
    charged = set()
    for (p, _), route in routes.items():
        for hop in route.hops:
            if hop in ops and (p, hop) not in charged:
                charged.add((p, hop))
                ops[hop] += graph[p].shape.output_elements
    return ops


def feeding_array(hw, route):
    """The last analog array a route passes before reaching digital hardware."""
    last = None
    for u in route.path:
        if isinstance(hw[u], AnalogArraySpec):
            last = u
        else:
            break
    return last


def route_memory(hw, route):
    for u in route.path[1:-1]:
        if isinstance(hw[u], MemorySpec):
            return u
    return None


def is_analog_stage(hw, mapping, stage_name):
    return isinstance(hw.get(mapping.unit_of(stage_name)), AnalogArraySpec)


def is_digital_stage(hw, mapping, stage_name):
    return isinstance(hw.get(mapping.unit_of(stage_name)), DigitalUnitSpec)


def analog_chain_length(hw, ops):
    """Longest chain of busy analog arrays (ops > 0) along source links."""
    arrays = [a.name for a in hw.analog_arrays]
    memo = {}

    def depth(name, stack):
        if name in memo:
            return memo[name]
        best = 0
        for s in hw[name].source:
            if s in ops and s not in stack:
                best = max(best, depth(s, stack | {s}))
        memo[name] = best + (1 if ops.get(name, 0) > 0 else 0)
        return memo[name]

    return max((depth(a, {a}) for a in arrays), default=0)


def first_digital_consumer(graph, hw, mapping, order):
    """First digital stage (in topological order) consuming data produced in the analog domain."""
    for name in order:
        st = graph[name]
        if not is_digital_stage(hw, mapping, name):
            continue
        if any(is_analog_stage(hw, mapping, p) for p in st.predecessors):
            return st
    return None


def has_multirow_prologue(stage):
    """True when the stage's first window needs data beyond the first input row."""
    h, w, c = stage.shape.input_size
    if stage.kind is StageKind.STENCIL:
        kh, kw = stage.shape.kernel
        last = ((kh - 1) * w + (kw - 1)) * c + c - 1
    elif stage.kind is StageKind.DNN_LAYER_LIST:
        last = h * w * c - 1
    else:
        last = c - 1
    return last >= w * c
