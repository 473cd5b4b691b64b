"""Construction of analog cells and components from document fields.

Components that do not spell out their cells fall back to the bundled
per-kind defaults in data/components.yaml.
"""
from functools import lru_cache
from importlib import resources

import yaml

from ..errors import SchemaError
from ..ir.hardware import (
    ACellSpec,
    AComponentSpec,
    CapNode,
    CellClass,
    ComponentKind,
    HardwareError,
    default_swing,
)
from ..units import UnitError, parse_quantity

CELL_KEYS = {
    "name", "class", "nodes", "load_capacitance", "voltage_swing", "supply", "transistors", "gain",
    "gm_over_id", "allow_gm_id_out_of_range", "fom", "spatial", "temporal", "delay",
}
NODE_KEYS = {"capacitance", "resolution", "voltage_swing", "transistors", "noise_sigma"}


def quantity(d, key, dim, where, default=None):
    if key not in d:
        return default
    try:
        return parse_quantity(d[key], dim)
    except UnitError as e:
        raise SchemaError(f"{where}.{key}: {e}") from None


def count(d, key, where, default=None, minimum=1):
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise SchemaError(f"{where}.{key}: expected an integer >= {minimum}, got {v!r}")
    return v


def number(d, key, where, default=None):
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where}.{key}: expected a dimensionless number, got {v!r}")
    return float(v)


def reject_unknown(d, allowed, where):
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected a mapping, got {type(d).__name__}")
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise SchemaError(f"{where}: unknown keys {', '.join(extra)}")


@lru_cache(maxsize=None)
def _data(name):
    return yaml.safe_load(resources.files("cisenergy.data").joinpath(name).read_text())


def placeholder_fom():
    return tuple((parse_quantity(r, "frequency"), parse_quantity(e, "energy")) for r, e in _data("fom_placeholder.yaml"))


def default_component_table():
    return _data("components.yaml")


def _swing(d, supply, where):
    v = quantity(d, "voltage_swing", "voltage", where)
    if v is not None:
        return v
    try:
        return default_swing(supply, count(d, "transistors", where, 1))
    except HardwareError as e:
        raise SchemaError(f"{where}: {e}") from None


def build_cell(d, supply, where):
    reject_unknown(d, CELL_KEYS, where)
    if "class" not in d:
        raise SchemaError(f"{where}: missing key class")
    try:
        cls = CellClass(d["class"])
    except ValueError:
        raise SchemaError(f"{where}.class: unknown cell class {d['class']!r}") from None
    supply = quantity(d, "supply", "voltage", where, supply)
    kw = dict(
        name=d.get("name", where),
        cell_class=cls,
        spatial_count=count(d, "spatial", where, 1),
        temporal_count=count(d, "temporal", where, 1),
        delay=quantity(d, "delay", "time", where),
        supply=supply,
    )
    if cls is CellClass.DYNAMIC:
        nodes = []
        for i, nd in enumerate(d.get("nodes") or []):
            w = f"{where}.nodes[{i}]"
            reject_unknown(nd, NODE_KEYS, w)
            node_supply = supply
            nodes.append(dict(
                voltage_swing=_swing(nd, node_supply, w),
                capacitance=quantity(nd, "capacitance", "capacitance", w),
                resolution_bits=count(nd, "resolution", w),
                noise_sigma=quantity(nd, "noise_sigma", "voltage", w),
            ))
        try:
            kw["nodes"] = tuple(CapNode(**n) for n in nodes)
        except HardwareError as e:
            raise SchemaError(f"{where}: {e}") from None
    elif cls in (CellClass.STATIC_DIRECT, CellClass.STATIC_GMID):
        kw["load_capacitance"] = quantity(d, "load_capacitance", "capacitance", where)
        kw["voltage_swing"] = _swing(d, supply, where)
        if cls is CellClass.STATIC_GMID:
            kw["gm_over_id"] = number(d, "gm_over_id", where)
            kw["gain"] = number(d, "gain", where, 1.0)
            kw["allow_gm_id_out_of_range"] = bool(d.get("allow_gm_id_out_of_range", False))
    else:
        fom = d.get("fom", "placeholder")
        if fom == "placeholder":
            kw["fom_table"] = placeholder_fom()
        else:
            try:
                kw["fom_table"] = tuple(
                    (parse_quantity(r, "frequency"), parse_quantity(e, "energy")) for r, e in fom
                )
            except (UnitError, TypeError, ValueError) as e:
                raise SchemaError(f"{where}.fom: {e}") from None
    try:
        return ACellSpec(**kw)
    except HardwareError as e:
        raise SchemaError(f"{where}: {e}") from None


def build_component(kind, supply, where, cells=None, name=None, input_domain=None, output_domain=None):
    """A component of `kind`; missing cells and domains come from the defaults table."""
    try:
        kind = ComponentKind(kind)
    except ValueError:
        raise SchemaError(f"{where}.kind: unknown component kind {kind!r}") from None
    default = default_component_table()[kind.value]
    cell_dicts = cells if cells is not None else default["cells"]
    built = tuple(build_cell(c, supply, f"{where}.cells[{i}]") for i, c in enumerate(cell_dicts))
    try:
        return AComponentSpec(
            name=name or kind.value,
            kind=kind,
            cells=built,
            input_domain=input_domain or default["input_domain"],
            output_domain=output_domain or default["output_domain"],
        )
    except HardwareError as e:
        raise SchemaError(f"{where}: {e}") from None
