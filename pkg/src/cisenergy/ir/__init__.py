"""Intermediate representation of algorithm, hardware, and mapping."""
from .graph import (
    AlgorithmGraph,
    CycleDetected,
    DNNLayer,
    DuplicateStageName,
    GraphError,
    ShapeError,
    Stage,
    StageKind,
    StageShape,
    UnresolvedPredecessor,
    analog_op_count,
    build_graph,
    stage_op_count,
    topological_order,
)
from .hardware import (
    ACellSpec,
    AComponentSpec,
    AnalogArraySpec,
    CapNode,
    CellClass,
    ComponentKind,
    DigitalKind,
    DigitalUnitSpec,
    Hardware,
    HardwareError,
    LayerSpec,
    LinkKind,
    LinkSpec,
    MemoryKind,
    MemorySpec,
    SignalDomain,
)
from .mapping import MappingTable

__all__ = [
    "ACellSpec", "AComponentSpec", "AlgorithmGraph", "AnalogArraySpec", "CapNode", "CellClass",
    "ComponentKind", "CycleDetected", "DNNLayer", "DigitalKind", "DigitalUnitSpec", "DuplicateStageName",
    "GraphError", "Hardware", "HardwareError", "LayerSpec", "LinkKind", "LinkSpec", "MappingTable",
    "MemoryKind", "MemorySpec", "ShapeError", "SignalDomain", "Stage", "StageKind", "StageShape",
    "UnresolvedPredecessor", "analog_op_count", "build_graph", "stage_op_count", "topological_order",
]
