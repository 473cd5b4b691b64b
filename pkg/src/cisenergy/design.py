"""Design documents: YAML text to typed IR.

A document has three required sections (`software`, `hardware`, `mapping`)
and an optional `globals` section. Every dimensional value carries a unit
("100pJ", "2.5V", "100MHz"); bare numbers are rejected. The full key
reference lives in docs/schema.md.
"""
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .analog.cells import DEFAULT_TEMPERATURE
from .analog.components import build_component, count, number, quantity, reject_unknown
from .comm import MIPI_ENERGY_PER_BYTE, UTSV_ENERGY_PER_BYTE
from .digital import UnknownNode, scale_energy_across_nodes
from .errors import ParseError, SchemaError
from .ir.graph import DNNLayer, GraphError, Stage, StageKind, StageShape, build_graph
from .ir.hardware import (
    AnalogArraySpec,
    DigitalUnitSpec,
    Hardware,
    HardwareError,
    LayerSpec,
    LinkKind,
    LinkSpec,
    MemorySpec,
)
from .ir.mapping import MappingTable
from .units import UnitError, parse_quantity

SECTIONS = ("software", "hardware", "mapping")
GLOBAL_KEYS = {"fps", "temperature", "bit_depth", "analog_supply", "process_scaling"}
STAGE_KEYS = {"name", "kind", "input_size", "output_size", "kernel", "stride", "ops_per_window",
              "predecessors", "layers", "bit_depth"}
HW_KEYS = {"layers", "analog_arrays", "digital_units", "memories", "links"}
LAYER_KEYS = {"name", "process_node", "area"}
ARRAY_KEYS = {"name", "layer", "source", "num_input", "num_output", "input_domain", "output_domain",
              "category", "components", "supply"}
COMPONENT_KEYS = {"kind", "count", "name", "cells", "input_domain", "output_domain"}
UNIT_KEYS = {"name", "kind", "layer", "source", "input_pixels_per_cycle", "output_pixels_per_cycle",
             "num_stages", "clock", "energy_per_cycle", "energy_node", "rows", "cols", "category"}
MEMORY_KEYS = {"name", "kind", "layer", "source", "capacity", "rows", "row_width", "ports", "read_energy",
               "write_energy", "leakage_power", "energy_node", "active_fraction", "category"}
LINK_KEYS = {"name", "kind", "energy_per_byte", "layer"}
MAPPING_KEYS = {"stages", "links"}
DEFAULT_SUPPLY = 2.5  # volts


@dataclass(frozen=True)
class Globals:
    fps: float = None
    temperature: float = DEFAULT_TEMPERATURE
    bit_depth: int = 8
    analog_supply: float = DEFAULT_SUPPLY
    process_scaling: dict = field(default_factory=dict)  # metres -> relative energy factor


@dataclass(frozen=True)
class Design:
    graph: object
    hardware: Hardware
    mapping: MappingTable
    globals: Globals
    name: str = "design"

    def __iter__(self):
        return iter((self.graph, self.hardware, self.mapping, self.globals))


def _dims(value, n, where):
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise SchemaError(f"{where}: expected a list of {n} integers, got {value!r}")
    if any(isinstance(v, bool) or not isinstance(v, int) for v in value):
        raise SchemaError(f"{where}: expected integers, got {value!r}")
    return tuple(value)


def _list(d, key, where):
    v = d.get(key) or []
    if not isinstance(v, list):
        raise SchemaError(f"{where}.{key}: expected a list")
    return v


def _names(v, where):
    if v is None:
        return ()
    if isinstance(v, str):
        return (v,)
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise SchemaError(f"{where}: expected a name or a list of names")
    return tuple(v)


def _require(d, keys, where):
    missing = [k for k in keys if k not in d]
    if missing:
        raise SchemaError(f"{where}: missing keys {', '.join(missing)}")


def _globals(d):
    d = d or {}
    reject_unknown(d, GLOBAL_KEYS, "globals")
    scaling = {}
    raw = d.get("process_scaling") or {}
    if not isinstance(raw, dict):
        raise SchemaError("globals.process_scaling: expected a mapping of node to factor")
    for node, factor in raw.items():
        try:
            key = parse_quantity(str(node), "length")
        except UnitError as e:
            raise SchemaError(f"globals.process_scaling: {e}") from None
        if isinstance(factor, bool) or not isinstance(factor, (int, float)) or factor <= 0:
            raise SchemaError(f"globals.process_scaling.{node}: factor must be a positive number")
        scaling[key] = float(factor)
    return Globals(
        fps=quantity(d, "fps", "frequency", "globals"),
        temperature=quantity(d, "temperature", "temperature", "globals", DEFAULT_TEMPERATURE),
        bit_depth=count(d, "bit_depth", "globals", 8),
        analog_supply=quantity(d, "analog_supply", "voltage", "globals", DEFAULT_SUPPLY),
        process_scaling=scaling,
    )


def _stage(d, i, bit_depth):
    where = f"software.stages[{i}]"
    reject_unknown(d, STAGE_KEYS, where)
    _require(d, ("name", "kind", "input_size"), where)
    where = f"software.stages[{d['name']}]"
    try:
        kind = StageKind(d["kind"])
    except ValueError:
        raise SchemaError(f"{where}.kind: unknown stage kind {d['kind']!r}") from None
    layers = []
    for j, l in enumerate(_list(d, "layers", where)):
        reject_unknown(l, {"output", "macs_per_output"}, f"{where}.layers[{j}]")
        _require(l, ("output", "macs_per_output"), f"{where}.layers[{j}]")
        try:
            layers.append(DNNLayer(_dims(l["output"], 3, f"{where}.layers[{j}].output"),
                                   count(l, "macs_per_output", f"{where}.layers[{j}]")))
        except GraphError as e:
            raise SchemaError(f"{where}.layers[{j}]: {e}") from None
    inp = _dims(d["input_size"], 3, f"{where}.input_size")
    if "output_size" in d:
        out = _dims(d["output_size"], 3, f"{where}.output_size")
    elif kind is StageKind.DNN_LAYER_LIST and layers:
        out = tuple(layers[-1].output)
    elif kind in (StageKind.PIXEL_INPUT, StageKind.ELEMENTWISE_BINARY):
        out = inp
    else:
        raise SchemaError(f"{where}: missing key output_size")
    try:
        shape = StageShape(
            inp, out,
            _dims(d.get("kernel", [1, 1]), 2, f"{where}.kernel"),
            _dims(d.get("stride", [1, 1]), 2, f"{where}.stride"),
        )
        return Stage(
            name=d["name"],
            kind=kind,
            shape=shape,
            ops_per_window=count(d, "ops_per_window", where, 1, minimum=0),
            predecessors=_names(d.get("predecessors"), f"{where}.predecessors"),
            layers=tuple(layers),
            bit_depth=count(d, "bit_depth", where),
        )
    except GraphError as e:
        raise SchemaError(f"{where}: {e}") from None


def _scaled(d, key, dim, where, layer, g):
    """An energy value, rescaled from `energy_node` to the unit's layer node when both are known."""
    value = quantity(d, key, dim, where)
    node = quantity(d, "energy_node", "length", where)
    if value is None or node is None or layer is None or layer.process_node is None:
        return value
    try:
        return scale_energy_across_nodes(value, node, layer.process_node, g.process_scaling)
    except UnknownNode as e:
        raise SchemaError(f"{where}: {e.args[0]}; add it to globals.process_scaling") from None


def _hardware(d, g):
    reject_unknown(d, HW_KEYS, "hardware")
    layers = []
    for i, l in enumerate(_list(d, "layers", "hardware")):
        w = f"hardware.layers[{i}]"
        reject_unknown(l, LAYER_KEYS, w)
        _require(l, ("name",), w)
        layers.append(LayerSpec(l["name"], quantity(l, "process_node", "length", w), quantity(l, "area", "area", w)))
    layer_of = {l.name: l for l in layers}

    arrays = []
    for i, a in enumerate(_list(d, "analog_arrays", "hardware")):
        w = f"hardware.analog_arrays[{i}]"
        reject_unknown(a, ARRAY_KEYS, w)
        _require(a, ("name", "components", "num_input", "num_output"), w)
        w = f"hardware.analog_arrays[{a['name']}]"
        supply = quantity(a, "supply", "voltage", w, g.analog_supply)
        comps = []
        for j, c in enumerate(_list(a, "components", w)):
            cw = f"{w}.components[{j}]"
            reject_unknown(c, COMPONENT_KEYS, cw)
            _require(c, ("kind", "count"), cw)
            comp = build_component(c["kind"], supply, cw, c.get("cells"), c.get("name"),
                                   c.get("input_domain"), c.get("output_domain"))
            comps.append((comp, count(c, "count", cw)))
        if not comps:
            raise SchemaError(f"{w}.components: at least one component is required")
        try:
            arrays.append(AnalogArraySpec(
                name=a["name"],
                components=tuple(comps),
                num_input=_dims(a["num_input"], 3, f"{w}.num_input"),
                num_output=_dims(a["num_output"], 3, f"{w}.num_output"),
                input_domain=a.get("input_domain") or comps[0][0].input_domain,
                output_domain=a.get("output_domain") or comps[-1][0].output_domain,
                source=_names(a.get("source"), f"{w}.source"),
                layer=a.get("layer"),
                category=a.get("category"),
            ))
        except HardwareError as e:
            raise SchemaError(f"{w}: {e}") from None

    units = []
    for i, u in enumerate(_list(d, "digital_units", "hardware")):
        w = f"hardware.digital_units[{i}]"
        reject_unknown(u, UNIT_KEYS, w)
        _require(u, ("name", "kind", "input_pixels_per_cycle", "output_pixels_per_cycle", "num_stages",
                     "clock", "energy_per_cycle"), w)
        w = f"hardware.digital_units[{u['name']}]"
        try:
            units.append(DigitalUnitSpec(
                name=u["name"],
                kind=u["kind"],
                input_pixels_per_cycle=_dims(u["input_pixels_per_cycle"], 3, f"{w}.input_pixels_per_cycle"),
                output_pixels_per_cycle=_dims(u["output_pixels_per_cycle"], 3, f"{w}.output_pixels_per_cycle"),
                num_stages=count(u, "num_stages", w),
                energy_per_cycle=_scaled(u, "energy_per_cycle", "energy", w, layer_of.get(u.get("layer")), g),
                clock=quantity(u, "clock", "frequency", w),
                rows=count(u, "rows", w, 1),
                cols=count(u, "cols", w, 1),
                source=_names(u.get("source"), f"{w}.source"),
                layer=u.get("layer"),
                category=u.get("category"),
            ))
        except (HardwareError, ValueError) as e:
            if isinstance(e, SchemaError):
                raise
            raise SchemaError(f"{w}: {e}") from None

    memories = []
    for i, m in enumerate(_list(d, "memories", "hardware")):
        w = f"hardware.memories[{i}]"
        reject_unknown(m, MEMORY_KEYS, w)
        _require(m, ("name", "kind", "read_energy", "write_energy", "leakage_power"), w)
        w = f"hardware.memories[{m['name']}]"
        layer = layer_of.get(m.get("layer"))
        try:
            memories.append(MemorySpec(
                name=m["name"],
                kind=m["kind"],
                read_energy=_scaled(m, "read_energy", "energy", w, layer, g),
                write_energy=_scaled(m, "write_energy", "energy", w, layer, g),
                leakage_power=_scaled(m, "leakage_power", "power", w, layer, g),
                capacity=quantity(m, "capacity", "bytes", w),
                rows=count(m, "rows", w),
                row_width=count(m, "row_width", w),
                ports=count(m, "ports", w, 1),
                active_fraction=number(m, "active_fraction", w),
                source=_names(m.get("source"), f"{w}.source"),
                layer=m.get("layer"),
                category=m.get("category"),
            ))
        except (HardwareError, ValueError) as e:
            if isinstance(e, SchemaError):
                raise
            raise SchemaError(f"{w}: {e}") from None

    links = []
    for i, l in enumerate(_list(d, "links", "hardware")):
        w = f"hardware.links[{i}]"
        reject_unknown(l, LINK_KEYS, w)
        _require(l, ("name", "kind"), w)
        try:
            kind = LinkKind(l["kind"])
        except ValueError:
            raise SchemaError(f"{w}.kind: unknown link kind {l['kind']!r}") from None
        default = MIPI_ENERGY_PER_BYTE if kind is LinkKind.MIPI else UTSV_ENERGY_PER_BYTE
        try:
            links.append(LinkSpec(l["name"], kind, quantity(l, "energy_per_byte", "energy", w, default), l.get("layer")))
        except HardwareError as e:
            raise SchemaError(f"{w}: {e}") from None
    try:
        return Hardware(tuple(arrays), tuple(units), tuple(memories), tuple(links), tuple(layers))
    except HardwareError as e:
        raise SchemaError(f"hardware: {e}") from None


def _mapping(d, graph):
    reject_unknown(d, MAPPING_KEYS, "mapping")
    stages = d.get("stages") or {}
    links = d.get("links") or {}
    if not isinstance(stages, dict) or not isinstance(links, dict):
        raise SchemaError("mapping: `stages` and `links` must be mappings")
    unknown = [s for s in list(stages) + list(links) if s not in graph]
    if unknown:
        raise SchemaError(f"mapping references unknown stage(s) {', '.join(map(repr, unknown))}")
    for s, v in stages.items():
        if not isinstance(v, str):
            raise SchemaError(f"mapping.stages.{s}: expected a unit name")
    return MappingTable.from_dicts(stages, {s: _names(v, f"mapping.links.{s}") for s, v in links.items()})


def load_design(text, name="design"):
    """Parse a design document. Raises ParseError on malformed YAML, SchemaError on bad content."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ParseError(f"malformed document: {getattr(e, 'problem', e)}", line=line) from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise SchemaError("document must be a mapping with software, hardware and mapping sections")
    problems = [f"missing section {s}" for s in SECTIONS if s not in doc]
    problems += [f"unknown section {s}" for s in doc if s not in SECTIONS + ("globals",)]
    if problems:
        raise SchemaError(problems)
    g = _globals(doc.get("globals"))
    sw = doc["software"] or {}
    reject_unknown(sw, {"stages"}, "software")
    stages = [_stage(s, i, g.bit_depth) for i, s in enumerate(_list(sw, "stages", "software"))]
    if not stages:
        raise SchemaError("software.stages: at least one stage is required")
    try:
        graph = build_graph(stages)
    except GraphError as e:
        raise SchemaError(f"software: {e}") from None
    hw = _hardware(doc["hardware"] or {}, g)
    mapping = _mapping(doc["mapping"] or {}, graph)
    return Design(graph, hw, mapping, g, name)


def load_design_file(path):
    path = Path(path)
    return load_design(path.read_text(), name=path.stem)
