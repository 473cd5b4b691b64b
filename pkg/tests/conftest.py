from importlib.resources import files
from pathlib import Path

import pytest

from cisenergy.design import load_design_file

DESIGNS = Path(str(files("cisenergy") / "designs"))
BUNDLED = sorted(DESIGNS.rglob("*.yaml"))


def design(rel):
    return load_design_file(DESIGNS / rel)


@pytest.fixture
def binning():
    return design("binning_edge.yaml")


def document(rel):
    import yaml
    return yaml.safe_load((DESIGNS / rel).read_text())


def load_doc(doc, name="edited"):
    import yaml
    from cisenergy.design import load_design
    return load_design(yaml.safe_dump(doc, sort_keys=False), name=name)


def shared_memory_doc():
    """The binning design with a second filter unit reading the same line buffer."""
    doc = document("binning_edge.yaml")
    doc["software"]["stages"].append({
        "name": "blur", "kind": "Stencil", "input_size": [16, 16, 1], "output_size": [15, 15, 1],
        "kernel": [2, 2], "stride": [1, 1], "ops_per_window": 4, "predecessors": ["bin"]})
    u2 = dict(doc["hardware"]["digital_units"][0], name="blur_unit")
    doc["hardware"]["digital_units"].append(u2)
    doc["hardware"]["memories"][0]["ports"] = 4
    doc["mapping"]["stages"]["blur"] = "blur_unit"
    doc["mapping"]["links"]["blur"] = ["mipi"]
    return doc


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, title, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f" ({detail})" if detail else ""))
