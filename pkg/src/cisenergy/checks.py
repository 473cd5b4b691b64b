"""Pre-simulation design checks.

Every check is a pure function of (graph, hardware, mapping) and returns a
CheckReport. Violations are collected rather than raised so that one pass
shows everything that needs fixing.
"""
from dataclasses import dataclass, field

from .ir.graph import GraphError, StageKind, find_cycle
from .ir.hardware import AnalogArraySpec, SignalDomain, domain_label
from .ir.topology import resolve_routes


@dataclass(frozen=True)
class Violation:
    rule: str
    producer: str
    consumer: str
    message: str
    fix: str = ""

    def to_dict(self):
        return {"rule": self.rule, "producer": self.producer, "consumer": self.consumer,
                "message": self.message, "fix": self.fix}


@dataclass
class CheckReport:
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)  # informational only

    @property
    def passed(self):
        return not self.violations

    def add(self, rule, producer, consumer, message, fix=""):
        v = Violation(rule, producer, consumer, message, fix)
        if v not in self.violations:
            self.violations.append(v)

    def note(self, text):
        if text not in self.notes:
            self.notes.append(text)

    def merge(self, other):
        for v in other.violations:
            if v not in self.violations:
                self.violations.append(v)
        for n in other.notes:
            self.note(n)
        return self

    @property
    def rules(self):
        return sorted({v.rule for v in self.violations})

    def to_dict(self):
        return {"passed": self.passed, "violations": [v.to_dict() for v in self.violations], "notes": list(self.notes)}

    @classmethod
    def from_dict(cls, d):
        return cls([Violation(**v) for v in d["violations"]], list(d["notes"]))


def _names(dom):
    return " or ".join(sorted(d.value for d in dom))


def _match_domains(report, prod_name, out_dom, cons_name, in_dom, cons_out):
    """Compare a producer output domain against a consumer input domain."""
    if out_dom & in_dom:
        if len(out_dom) > 1 or len(in_dom) > 1:
            report.note(
                f"{prod_name} -> {cons_name}: paired domain {domain_label(out_dom)} / {domain_label(in_dom)} "
                "matched on a shared member"
            )
        return
    if SignalDomain.CHARGE in out_dom and cons_out == frozenset([SignalDomain.VOLTAGE]):
        # the consumer's input capacitance integrates the charge
        report.note(f"{prod_name} -> {cons_name}: charge output accepted by a voltage-output consumer")
        return
    src, dst = sorted(out_dom)[0].value.lower(), sorted(in_dom)[0].value.lower()
    report.add(
        "DomainMismatch", prod_name, cons_name,
        f"{prod_name} outputs {_names(out_dom)} but {cons_name} expects {_names(in_dom)}",
        f"insert a {src}-to-{dst} conversion component between {prod_name} and {cons_name}",
    )


def _analog_prefix(hw, path):
    arrays = []
    for u in path:
        if not isinstance(hw[u], AnalogArraySpec):
            break
        arrays.append(hw[u])
    return arrays


def check_domain_compatibility(hw, mapping, graph):
    report = CheckReport()
    routes, _ = resolve_routes(graph, hw, mapping)
    used = set()
    for route in routes.values():
        arrays = _analog_prefix(hw, route.path)
        used.update(a.name for a in arrays)
        for a, b in zip(arrays, arrays[1:]):
            _match_domains(report, a.name, a.output_domain, b.name, b.input_domain, b.output_domain)
        if arrays and len(arrays) < len(route.path):
            last = arrays[-1]
            if SignalDomain.DIGITAL not in last.output_domain or not any(a.has_converter for a in arrays):
                nxt = route.path[len(arrays)]
                report.add(
                    "MissingADC", last.name, nxt,
                    f"analog data leaves {last.name} ({_names(last.output_domain)}) for digital unit {nxt} "
                    "without an analog-to-digital conversion",
                    f"insert an ADC array between {last.name} and {nxt}",
                )
    for name in mapping.units:
        if isinstance(hw.get(name), AnalogArraySpec):
            used.add(name)
    for a in hw.analog_arrays:
        if a.name not in used:
            continue
        comps = [c for c, _ in a.components]
        for c1, c2 in zip(comps, comps[1:]):
            _match_domains(report, f"{a.name}.{c1.name}", c1.output_domain, f"{a.name}.{c2.name}",
                           c2.input_domain, c2.output_domain)
    return report


def check_dimension_compatibility(hw, mapping, graph):
    report = CheckReport()
    routes, _ = resolve_routes(graph, hw, mapping)
    for route in routes.values():
        arrays = _analog_prefix(hw, route.path)
        for a, b in zip(arrays, arrays[1:]):
            if tuple(a.num_output) == tuple(b.num_input):
                continue
            if a.is_analog_memory or b.is_analog_memory:
                continue
            report.add(
                "DimensionMismatch", a.name, b.name,
                f"{a.name} emits {tuple(a.num_output)} signals per step but {b.name} takes {tuple(b.num_input)}",
                f"insert a sample-and-hold or analog memory array between {a.name} and {b.name}",
            )
    return report


def check_mapping(graph, hw, mapping):
    report = CheckReport()
    stage_names = set(graph.names)
    for stage, unit in mapping.entries:
        if stage not in stage_names:
            report.add("UnknownStage", stage, unit, f"mapping names unknown stage {stage!r}", "remove the entry")
    for st in graph:
        unit = mapping.unit_of(st.name)
        if unit is None:
            report.add("UnmappedStage", st.name, "", f"stage {st.name!r} is not mapped to any unit",
                       f"add a mapping entry for {st.name!r}")
            continue
        if unit not in hw:
            report.add("UnknownUnit", st.name, unit, f"stage {st.name!r} is mapped to unknown unit {unit!r}",
                       "map it to a declared analog array or digital unit")
            continue
        if hw.is_memory(unit):
            report.add("MappedToMemory", st.name, unit, f"stage {st.name!r} is mapped to memory {unit!r}",
                       "map compute stages to analog arrays or digital units")
            continue
        if st.kind is StageKind.PIXEL_INPUT:
            u = hw[unit]
            if not (isinstance(u, AnalogArraySpec) and u.is_pixel_array):
                report.add("PixelInputNotOnPixelArray", st.name, unit,
                           f"pixel input {st.name!r} must run on a pixel array, not {unit!r}",
                           "map it to an analog array built from pixel components")
    link_names = {l.name for l in hw.links}
    for stage, links in mapping.links:
        for l in links:
            if l not in link_names:
                report.add("UnknownLink", stage, l, f"stage {stage!r} is assigned unknown link {l!r}",
                           "declare the link under hardware.links")
    return report


def check_graph(graph):
    report = CheckReport()
    try:
        cycle = find_cycle(graph)
    except (GraphError, KeyError):
        cycle = None
    if cycle:
        report.add("CycleDetected", cycle[0], cycle[-1], "algorithm graph has a cycle: " + " -> ".join(cycle + cycle[:1]),
                   "break the cycle; frame-to-frame feedback is expressed with a temporal stage")
    for st in graph:
        if not st.predecessors or any(p not in graph for p in st.predecessors):
            continue
        shape_in = tuple(st.shape.input_size)
        firsts = st.predecessors[:2] if st.kind is StageKind.ELEMENTWISE_BINARY else st.predecessors[:1]
        for p in firsts:
            out = tuple(graph[p].shape.output_size)
            if out != shape_in:
                report.add("StageShapeMismatch", p, st.name,
                           f"{p!r} produces {out} but {st.name!r} expects input {shape_in}",
                           f"make {st.name}.input_size equal {p}.output_size")
    return report


def check_topology(graph, hw, mapping):
    report = CheckReport()
    _, problems = resolve_routes(graph, hw, mapping)
    for p in problems:
        report.add(p.rule, p.producer, p.consumer, p.message, p.fix)
    return report


def run_checks(graph, hw, mapping):
    """All checks in a fixed order; later checks only run on a sound mapping."""
    report = check_graph(graph).merge(check_mapping(graph, hw, mapping))
    if not report.passed:
        return report
    report.merge(check_topology(graph, hw, mapping))
    report.merge(check_domain_compatibility(hw, mapping, graph))
    report.merge(check_dimension_compatibility(hw, mapping, graph))
    return report
