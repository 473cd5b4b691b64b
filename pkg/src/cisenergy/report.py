"""End-to-end frame energy: checks, timing, the three energy domains, and report output."""
import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .analog.frame import analog_frame_energy
from .checks import CheckReport, run_checks
from .comm import comm_frame_energy, link_traffic
from .digital import digital_frame_energy
from .ir.topology import analog_ops, resolve_routes
from .timing.simulate import compute_timing
from .units import format_energy

CATEGORIES = ("SEN", "MEM", "COMP", "MIPI", "uTSV")


@dataclass
class ComponentRow:
    name: str
    domain: str  # analog | digital | comm
    category: str
    energy: float
    layer: Optional[str] = None
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "domain": self.domain, "category": self.category,
                "energy": self.energy, "layer": self.layer, "detail": self.detail}


@dataclass
class EnergyReport:
    name: str
    fps: float
    status: str  # ok | stalled | violations
    components: list = field(default_factory=list)
    checks: CheckReport = field(default_factory=CheckReport)
    timing: dict = field(default_factory=dict)
    power_density: dict = field(default_factory=dict)  # layer -> W/mm^2

    def _domain_total(self, domain):
        total = 0.0
        for c in self.components:
            if c.domain == domain:
                total += c.energy
        return total

    @property
    def analog(self):
        return self._domain_total("analog")

    @property
    def digital(self):
        return self._domain_total("digital")

    @property
    def comm(self):
        return self._domain_total("comm")

    @property
    def total(self):
        return self.analog + self.digital + self.comm

    @property
    def categories(self):
        out = {c: 0.0 for c in CATEGORIES}
        for row in self.components:
            out[row.category] = out.get(row.category, 0.0) + row.energy
        return out

    def to_dict(self):
        return {
            "name": self.name,
            "fps": self.fps,
            "status": self.status,
            "total": self.total,
            "analog": self.analog,
            "digital": self.digital,
            "comm": self.comm,
            "categories": self.categories,
            "components": [c.to_dict() for c in self.components],
            "checks": self.checks.to_dict(),
            "timing": self.timing,
            "power_density": self.power_density,
        }

    @classmethod
    def from_dict(cls, d):
        rows = [ComponentRow(**c) for c in d["components"]]
        return cls(d["name"], d["fps"], d["status"], rows, CheckReport.from_dict(d["checks"]),
                   d["timing"], d["power_density"])


def _power_density(rows, hw, fps):
    out = {}
    for layer in hw.layers:
        hosted = [r for r in rows if r.layer == layer.name]
        if not layer.area or not hosted:
            continue
        energy = sum(r.energy for r in hosted)
        out[layer.name] = energy * fps / (layer.area * 1e6)
    return out


def _timing_summary(t):
    return {
        "frame_time": t.frame_time,
        "digital_latency": t.digital_latency,
        "analog_stage_delay": t.analog_stage_delay,
        "analog_slots": t.analog_slots,
        "base_clock": t.base_clock,
        "unit_cycles": dict(sorted(t.unit_cycles.items())),
        "stalls": [s.to_dict() for s in t.stalls],
    }


def run(design, fps=None, backend=None):
    """Frame energy of one design at `fps`. Check failures yield a zero-energy report.

    Raises DigitalTooSlow when the digital pipeline alone misses the frame time.
    """
    graph, hw, mapping, g = design
    fps = fps if fps is not None else g.fps
    if not fps or fps <= 0:
        raise ValueError("a positive frame rate is required (pass fps or set globals.fps)")
    name = getattr(design, "name", "design")
    checks = run_checks(graph, hw, mapping)
    if not checks.passed:
        return EnergyReport(name, fps, "violations", checks=checks)

    routes, _ = resolve_routes(graph, hw, mapping)
    ops = analog_ops(graph, hw, mapping, routes)
    timing = compute_timing(graph, hw, mapping, fps, g.bit_depth, backend, routes, ops)
    analog = analog_frame_energy(hw, mapping, graph, timing, g.temperature, ops)
    digital = digital_frame_energy(hw, timing)
    comm = comm_frame_energy(hw.links, link_traffic(graph, mapping, g.bit_depth))

    rows = []
    for arr in hw.analog_arrays:
        a = analog.arrays[arr.name]
        if a.ops == 0:
            continue
        detail = {"ops": a.ops, "components": [
            {"name": c.name, "kind": c.kind, "count": c.num_component, "accesses": c.accesses,
             "energy_per_access": c.energy_per_access, "access_delay": c.access_delay}
            for c in a.components]}
        rows.append(ComponentRow(arr.name, "analog", arr.default_category, a.energy, arr.layer, detail))
    for u in hw.digital_units:
        if u.name in digital.units:
            e = digital.units[u.name]
            rows.append(ComponentRow(u.name, "digital", u.category or "COMP", e.energy, u.layer,
                                     {"cycles": e.cycles, "energy_per_cycle": e.energy_per_cycle}))
    for m in hw.memories:
        if m.name in digital.memories:
            e = digital.memories[m.name]
            rows.append(ComponentRow(m.name, "digital", m.category or "MEM", e.energy, m.layer,
                                     {"reads": e.reads, "writes": e.writes, "alpha": e.alpha,
                                      "dynamic": e.dynamic, "leakage": e.leakage}))
    for link in hw.links:
        if link.name in comm.links:
            e = comm.links[link.name]
            rows.append(ComponentRow(link.name, "comm", e.kind, e.energy, link.layer,
                                     {"bytes": e.bytes, "energy_per_byte": e.energy_per_byte}))
    status = "stalled" if timing.stalls else "ok"
    return EnergyReport(name, fps, status, rows, checks, _timing_summary(timing), _power_density(rows, hw, fps))


def emit(report, fmt="table"):
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["component", "domain", "category", "layer", "energy_J"])
        for r in report.components:
            w.writerow([r.name, r.domain, r.category, r.layer or "", repr(r.energy)])
        w.writerow(["total", "", "", "", repr(report.total)])
        return buf.getvalue()
    if fmt == "table":
        return _table(report)
    raise ValueError(f"unknown format {fmt!r}")


def parse_report(text):
    return EnergyReport.from_dict(json.loads(text))


def _table(r):
    lines = [f"{r.name} @ {r.fps:g} FPS  [{r.status}]"]
    if r.checks.violations:
        lines.append("check violations:")
        for v in r.checks.violations:
            fix = f" (fix: {v.fix})" if v.fix else ""
            lines.append(f"  {v.rule}: {v.message}{fix}")
    for n in r.checks.notes:
        lines.append(f"note: {n}")
    if r.components:
        width = max(len(c.name) for c in r.components)
        lines.append("")
        for c in r.components:
            lines.append(f"  {c.name:<{width}}  {c.category:<5}  {format_energy(c.energy):>10}")
    lines.append("")
    lines.append(f"  analog   {format_energy(r.analog):>10}")
    lines.append(f"  digital  {format_energy(r.digital):>10}")
    lines.append(f"  comm     {format_energy(r.comm):>10}")
    lines.append(f"  total    {format_energy(r.total):>10}")
    t = r.timing
    if t:
        lines.append("")
        lines.append(f"  frame time {t['frame_time']:.6g} s, digital latency {t['digital_latency']:.6g} s, "
                     f"analog stage delay {t['analog_stage_delay']:.6g} s over {t['analog_slots']} slot(s)")
        for s in t["stalls"]:
            lines.append(f"  stall {s['cause']} at {s['unit']} cycle {s['cycle']}: {s['detail']}")
    for layer, pd in sorted(r.power_density.items()):
        lines.append(f"  power density {layer}: {pd:.4g} W/mm^2")
    return "\n".join(lines) + "\n"


@dataclass
class SweepRow:
    name: str
    status: str
    total: float = 0.0
    categories: dict = field(default_factory=dict)
    normalized: dict = field(default_factory=dict)  # category energy / baseline total
    error: str = ""
    report: Optional[EnergyReport] = None


def sweep(designs, fps=None, max_workers=None, backend=None):
    """Run every design; one failing design does not stop the others.

    Category energies are normalized to the total of the first design that ran.
    """
    def one(d):
        try:
            rep = run(d, fps, backend)
        except Exception as e:  # isolate per-design failures
            return SweepRow(getattr(d, "name", "design"), "failed", error=f"{type(e).__name__}: {e}")
        if rep.status == "violations":
            return SweepRow(rep.name, "failed", error="; ".join(v.rule for v in rep.checks.violations), report=rep)
        return SweepRow(rep.name, rep.status, rep.total, rep.categories, report=rep)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(one, designs))
    base = next((r.total for r in rows if r.status != "failed"), None)
    for r in rows:
        if r.status != "failed" and base:
            r.normalized = {k: v / base for k, v in r.categories.items()}
    return rows


def emit_sweep(rows, fmt="table"):
    cats = list(CATEGORIES)
    for r in rows:
        cats += [c for c in r.categories if c not in cats]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["design", "status", "total_J"] + cats + [f"{c}_norm" for c in cats])
        for r in rows:
            w.writerow([r.name, r.status, repr(r.total)]
                       + [repr(r.categories.get(c, 0.0)) for c in cats]
                       + [repr(r.normalized.get(c, 0.0)) for c in cats])
        return buf.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    width = max([len(r.name) for r in rows] + [6])
    head = f"{'design':<{width}}  {'total':>10}  " + "  ".join(f"{c:>10}" for c in cats)
    lines = [head]
    for r in rows:
        if r.status == "failed":
            lines.append(f"{r.name:<{width}}  FAILED: {r.error}")
            continue
        cells = "  ".join(f"{r.normalized.get(c, 0.0):>10.4f}" for c in cats)
        flag = " (stalled)" if r.status == "stalled" else ""
        lines.append(f"{r.name:<{width}}  {format_energy(r.total):>10}  {cells}{flag}")
    lines.append("categories are fractions of the first design's total")
    return "\n".join(lines) + "\n"
