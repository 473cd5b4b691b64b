"""Algorithm description: a DAG of stencil stages."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class GraphError(ValueError):
    pass


class DuplicateStageName(GraphError):
    pass


class UnresolvedPredecessor(GraphError):
    pass


class CycleDetected(GraphError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join(self.cycle + self.cycle[:1]))


class ShapeError(GraphError):
    pass


class StageKind(str, Enum):
    PIXEL_INPUT = "PixelInput"
    STENCIL = "Stencil"
    ELEMENTWISE_BINARY = "ElementwiseBinary"
    DNN_LAYER_LIST = "DNNLayerList"


Dims = tuple  # (height, width, channels)


def _check_dims(name, dims, n):
    if len(dims) != n or any(int(d) != d or d < 1 for d in dims):
        raise ShapeError(f"{name} must be {n} integers >= 1, got {dims!r}")


@dataclass(frozen=True)
class StageShape:
    input_size: Dims
    output_size: Dims
    kernel: tuple = (1, 1)
    stride: tuple = (1, 1)

    def __post_init__(self):
        _check_dims("input_size", self.input_size, 3)
        _check_dims("output_size", self.output_size, 3)
        _check_dims("kernel", self.kernel, 2)
        _check_dims("stride", self.stride, 2)

    @property
    def is_elementwise(self):
        return tuple(self.kernel) == (1, 1) and tuple(self.stride) == (1, 1)

    def expected_output_hw(self):
        (ih, iw, _), (kh, kw), (sh, sw) = self.input_size, self.kernel, self.stride
        if kh > ih or kw > iw:
            return (0, 0)
        return ((ih - kh) // sh + 1, (iw - kw) // sw + 1)

    def is_consistent(self):
        """True when the output spatial dims follow from a valid-mode stencil sweep."""
        return self.expected_output_hw() == tuple(self.output_size[:2])

    @property
    def num_windows(self):
        oh, ow, _ = self.output_size
        return oh * ow

    @property
    def input_elements(self):
        h, w, c = self.input_size
        return h * w * c

    @property
    def output_elements(self):
        h, w, c = self.output_size
        return h * w * c


@dataclass(frozen=True)
class DNNLayer:
    output: Dims
    macs_per_output: int

    def __post_init__(self):
        _check_dims("layer output", self.output, 3)
        if self.macs_per_output < 1:
            raise ShapeError("macs_per_output must be >= 1")

    @property
    def macs(self):
        h, w, c = self.output
        return h * w * c * self.macs_per_output


@dataclass(frozen=True)
class Stage:
    name: str
    kind: StageKind
    shape: StageShape
    ops_per_window: int = 1
    predecessors: tuple = ()
    layers: tuple = ()
    bit_depth: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", StageKind(self.kind))
        object.__setattr__(self, "predecessors", tuple(self.predecessors))
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.ops_per_window < 0:
            raise ShapeError(f"{self.name}: ops_per_window must be >= 0")
        if self.kind is StageKind.PIXEL_INPUT:
            if self.predecessors:
                raise GraphError(f"{self.name}: PixelInput stages take no predecessors")
            if tuple(self.shape.input_size) != tuple(self.shape.output_size):
                raise ShapeError(f"{self.name}: PixelInput input and output sizes must agree")
        elif not self.predecessors:
            raise GraphError(f"{self.name}: non-input stage needs at least one predecessor")
        if self.kind is StageKind.STENCIL and not self.shape.is_consistent():
            eh, ew = self.shape.expected_output_hw()
            raise ShapeError(
                f"{self.name}: output {self.shape.output_size[:2]} does not follow from "
                f"input {self.shape.input_size[:2]}, kernel {self.shape.kernel}, stride {self.shape.stride} "
                f"(expected ({eh}, {ew}))"
            )
        if self.kind is StageKind.ELEMENTWISE_BINARY:
            if not self.shape.is_elementwise or tuple(self.shape.input_size) != tuple(self.shape.output_size):
                raise ShapeError(f"{self.name}: elementwise stages need 1x1 kernel/stride and equal in/out sizes")
            if len(self.predecessors) > 2:
                raise GraphError(f"{self.name}: elementwise binary stages take one or two predecessors")
        if self.kind is StageKind.DNN_LAYER_LIST:
            if not self.layers:
                raise ShapeError(f"{self.name}: DNN stage needs at least one layer")
            if tuple(self.layers[-1].output) != tuple(self.shape.output_size):
                raise ShapeError(f"{self.name}: last layer output must equal the stage output_size")

    @property
    def is_temporal(self):
        """Elementwise stage with one predecessor: the second operand is the previous frame."""
        return self.kind is StageKind.ELEMENTWISE_BINARY and len(self.predecessors) == 1

    @property
    def primary(self):
        return self.predecessors[0] if self.predecessors else None


@dataclass(frozen=True)
class AlgorithmGraph:
    stages: tuple
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __getitem__(self, name):
        return self._index[name]

    def __contains__(self, name):
        return name in self._index

    def __iter__(self):
        return iter(self.stages)

    def __len__(self):
        return len(self.stages)

    @property
    def names(self):
        return [s.name for s in self.stages]

    @property
    def edges(self):
        """(producer, consumer) pairs in declaration order of the consumer."""
        return [(p, s.name) for s in self.stages for p in s.predecessors]

    def consumers(self, name):
        return [s.name for s in self.stages if name in s.predecessors]


def build_graph(stages):
    """Connect stages by their predecessor names; declaration order is preserved."""
    index = {}
    for s in stages:
        if s.name in index:
            raise DuplicateStageName(f"duplicate stage name {s.name!r}")
        index[s.name] = s
    for s in stages:
        for p in s.predecessors:
            if p not in index:
                raise UnresolvedPredecessor(f"stage {s.name!r} references unknown predecessor {p!r}")
    return AlgorithmGraph(tuple(stages), index)


def find_cycle(graph):
    """Return the stage names of one cycle, or None if the graph is acyclic."""
    color = {n: 0 for n in graph.names}
    stack = []

    def visit(n):
        color[n] = 1
        stack.append(n)
        for p in graph[n].predecessors:
            if color[p] == 1:
                cyc = stack[stack.index(p):]
                # report along the data-flow direction
                return list(reversed(cyc))
            if color[p] == 0:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        color[n] = 2
        return None

    for n in graph.names:
        if color[n] == 0:
            found = visit(n)
            if found:
                # rotate so the earliest-declared stage leads
                order = {name: i for i, name in enumerate(graph.names)}
                k = min(range(len(found)), key=lambda i: order[found[i]])
                return found[k:] + found[:k]
    return None


def topological_order(graph):
    """Kahn's algorithm; ties go to the stage declared first."""
    order = {name: i for i, name in enumerate(graph.names)}
    pending = {s.name: len(set(s.predecessors)) for s in graph}
    out = []
    ready = sorted((n for n, k in pending.items() if k == 0), key=order.get)
    while ready:
        n = ready.pop(0)
        out.append(n)
        for c in graph.consumers(n):
            pending[c] -= 1
            if pending[c] == 0:
                ready.append(c)
                ready.sort(key=order.get)
    if len(out) != len(graph):
        raise CycleDetected(find_cycle(graph))
    return out


def stage_op_count(stage):
    """Arithmetic operations per frame: windows x output channels x ops per window."""
    if stage.kind is StageKind.PIXEL_INPUT:
        return 0
    if stage.kind is StageKind.DNN_LAYER_LIST:
        return sum(layer.macs for layer in stage.layers)
    oh, ow, oc = stage.shape.output_size
    return oh * ow * oc * stage.ops_per_window


def analog_op_count(stage):
    """Operations a stage contributes to the array it runs on; a pixel input senses every pixel once."""
    if stage.kind is StageKind.PIXEL_INPUT:
        return stage.shape.output_elements
    return stage_op_count(stage)
