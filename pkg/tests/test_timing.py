import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cisenergy.checks import run_checks
from cisenergy.ir import ACellSpec, AComponentSpec, CellClass, CapNode
from cisenergy.oracle import replay
from cisenergy.timing import (
    BACKENDS, DigitalTooSlow, OverCommitted, allocate_analog_delay, allocate_cell_delays, compute_timing,
    detect_stalls, memory_access_counts, simulate_digital,
)
from cisenergy.timing.delay import static_windows
from conftest import design, document, load_doc
from designgen import random_document, load

BACKEND_NAMES = sorted(BACKENDS)


def cells(k, pinned=()):
    pins = dict(pinned)
    return [ACellSpec(f"c{i}", CellClass.DYNAMIC, nodes=(CapNode(1.0, 1e-15),), delay=pins.get(i)) for i in range(k)]


# delay allocation

def test_allocate_analog_delay_examples():
    assert allocate_analog_delay(1 / 30, 1 / 300, 3) == pytest.approx(10e-3, rel=1e-12)
    with pytest.raises(DigitalTooSlow):
        allocate_analog_delay(1 / 30, 1 / 30, 3)
    with pytest.raises(ValueError):
        allocate_analog_delay(1 / 30, 0.0, 0)


def test_allocate_cell_delays_examples():
    assert allocate_cell_delays(10e-3, cells(2)) == [5e-3, 5e-3]
    assert allocate_cell_delays(10e-3, cells(3, [(0, 4e-3)])) == pytest.approx([4e-3, 3e-3, 3e-3], rel=1e-12)
    with pytest.raises(OverCommitted):
        allocate_cell_delays(10e-3, cells(2, [(0, 6e-3), (1, 6e-3)]))


@given(st.floats(1e-6, 1.0), st.integers(1, 8))
def test_cell_delays_sum_to_budget(t_a, k):
    d = allocate_cell_delays(t_a, cells(k))
    assert sum(d) == pytest.approx(t_a, rel=1e-12)
    assert static_windows(t_a, d)[0] == t_a


def test_component_accepted_for_cell_delays():
    comp = AComponentSpec("x", "Scaling", tuple(cells(4)), "Voltage", "Voltage")
    assert allocate_cell_delays(8.0, comp) == [2.0] * 4


# cycle simulation

@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_binning_golden_cycles(binning, backend):
    g, hw, m, _ = binning
    sim = simulate_digital(g, hw, m, backend=backend)
    assert sim.unit_cycles == {"edge_unit": 260}
    assert sim.digital_latency == pytest.approx(2.6e-6, rel=1e-12)
    assert detect_stalls(sim) == []
    assert sim.reads == {"line_buffer": 14 * 14 * 9}
    assert sim.writes == {"line_buffer": 256}


def test_binning_cycles_match_oracle_replay(binning):
    g, hw, m, _ = binning
    cycles, events = replay(g, hw, m)
    assert cycles == simulate_digital(g, hw, m).unit_cycles
    assert [e for e in events if e[2] == "output"][-1][0] == 260


def _whole_frame_doc():
    doc = document("binning_edge.yaml")
    doc["software"]["stages"] = [doc["software"]["stages"][0], {
        "name": "copy", "kind": "Stencil", "input_size": [4, 4, 1], "output_size": [1, 1, 1],
        "kernel": [4, 4], "stride": [4, 4], "ops_per_window": 16, "predecessors": ["input"]}]
    doc["software"]["stages"][0]["input_size"] = [4, 4, 1]
    hw = doc["hardware"]
    hw["analog_arrays"][0].update(num_input=[4, 4, 1], num_output=[4, 4, 1])
    hw["analog_arrays"][0]["components"][0]["count"] = 16
    hw["analog_arrays"][1].update(num_input=[4, 4, 1], num_output=[4, 4, 1])
    hw["memories"] = []
    hw["digital_units"][0].update(source=["adc_array"], input_pixels_per_cycle=[4, 4, 1],
                                  output_pixels_per_cycle=[1, 1, 1], num_stages=1)
    doc["mapping"] = {"stages": {"input": "pixel_array", "copy": "edge_unit"}, "links": {"copy": ["mipi"]}}
    return doc


@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_whole_frame_unit_takes_one_cycle(backend):
    d = load_doc(_whole_frame_doc())
    assert run_checks(d.graph, d.hardware, d.mapping).passed
    sim = simulate_digital(d.graph, d.hardware, d.mapping, backend=backend)
    assert sim.unit_cycles == {"edge_unit": 1}
    assert replay(d.graph, d.hardware, d.mapping)[0] == {"edge_unit": 1}


@pytest.mark.parametrize("rel,cause,unit", [
    ("stalls/rows1_line_buffer.yaml", "ProducerNotReady", "edge_unit"),
    ("stalls/fifo_overflow.yaml", "MemoryFull", "wide_unit"),
    ("stalls/port_conflict.yaml", "InsufficientPorts", None),
])
@pytest.mark.parametrize("backend", BACKEND_NAMES)
def test_constructed_stalls(rel, cause, unit, backend):
    g, hw, m, _ = design(rel)
    stalls = detect_stalls(simulate_digital(g, hw, m, backend=backend))
    assert stalls
    assert {s.cause for s in stalls} == {cause}
    if unit:
        assert unit in {s.unit for s in stalls}


def test_rows1_flagged_at_first_window():
    g, hw, m, _ = design("stalls/rows1_line_buffer.yaml")
    s = detect_stalls(simulate_digital(g, hw, m))[0]
    assert s.memory == "line_buffer"
    # the buffer overflows while the first window is still being assembled
    assert s.cycle <= 3


def test_binning_delay_formula(binning):
    g, hw, m, _ = binning
    t = compute_timing(g, hw, m, 30)
    assert t.analog_slots == 3
    assert t.analog_stage_delay == (1 / 30 - t.digital_latency) / 3
    assert t.stall_free


@pytest.mark.parametrize("fps", [1, 30, 60, 240, 1000])
def test_balanced_pipeline(binning, fps):
    g, hw, m, _ = binning
    t = compute_timing(g, hw, m, fps)
    total = t.analog_slots * t.analog_stage_delay + t.digital_latency
    assert abs(total - t.frame_time) <= 2 * np.spacing(t.frame_time)
    for (array, comp), delays in t.cell_delays.items():
        assert sum(delays) == pytest.approx(delays[0] * len(delays), rel=1e-12)


def test_stage_delay_falls_with_fps(binning):
    g, hw, m, _ = binning
    delays = [compute_timing(g, hw, m, f).analog_stage_delay for f in (10, 30, 60, 120, 1000, 10000)]
    assert all(a >= b for a, b in zip(delays, delays[1:]))


def test_digital_too_slow(binning):
    g, hw, m, _ = binning
    with pytest.raises(DigitalTooSlow) as exc:
        compute_timing(g, hw, m, 1e6)
    assert exc.value.t_d == pytest.approx(2.6e-6)


def test_determinism(binning):
    g, hw, m, _ = binning
    a, b = simulate_digital(g, hw, m), simulate_digital(g, hw, m)
    assert a == b


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_writes_equal_producer_output_and_reads_match_closed_form(seed):
    d = load(random_document(random.Random(seed), max_side=32))
    sim = simulate_digital(d.graph, d.hardware, d.mapping, d.globals.bit_depth)
    reads, writes = memory_access_counts(d.graph, d.hardware, d.mapping)
    assert sim.reads == reads
    assert sim.writes == writes


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_stall_free_cycles_match_replay(seed):
    doc = random_document(random.Random(seed), max_side=32, single_clock=True)
    for mem in doc["hardware"]["memories"]:
        mem.pop("rows", None)
        mem.pop("row_width", None)
        mem.update(kind="DoubleBuffer", capacity="1MB", ports=8)
    d = load(doc)
    sim = simulate_digital(d.graph, d.hardware, d.mapping, d.globals.bit_depth)
    assert sim.stalls == []
    assert replay(d.graph, d.hardware, d.mapping)[0] == sim.unit_cycles
