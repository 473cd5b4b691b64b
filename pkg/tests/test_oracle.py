import random

import pytest
from hypothesis import given, settings, strategies as st

from cisenergy.ir import StageShape, stage_op_count
from cisenergy.oracle import (
    TooLarge, brute_force_counts, enumerate_windows, replay, round_robin, verify, window_elements,
)
from cisenergy.timing import simulate_digital
from conftest import design, document, load_doc, shared_memory_doc
from designgen import load, random_design, random_document


def test_binning_bin_windows(binning):
    g, hw, m, _ = binning
    t = brute_force_counts(g, hw, m)
    assert t.stage_windows["bin"] == 256
    assert t.stage_windows["edge"] == 196
    assert t.stage_ops == {"input": 0, "bin": 1024, "edge": 1764}
    assert t.afa_ops == {"pixel_array": 1024 + 1024, "adc_array": 256}
    assert t.afa_accesses["adc_array"] == {"ADC": 16}
    assert t.memory_writes == {"line_buffer": 256}
    assert t.memory_reads == {"line_buffer": 1764}


def test_three_by_three_on_sixteen():
    s = StageShape((16, 16, 1), (14, 14, 1), (3, 3), (1, 1))
    wins = enumerate_windows(s)
    assert len(wins) == 196
    assert window_elements(s, (0, 0)) == [0, 1, 2, 16, 17, 18, 32, 33, 34]


def test_elementwise_ops_are_h_times_w():
    doc = document("binning_edge.yaml")
    doc["software"]["stages"][2] = {"name": "edge", "kind": "ElementwiseBinary", "input_size": [16, 16, 1],
                                    "predecessors": ["bin"]}
    doc["hardware"]["memories"][0] = {"name": "line_buffer", "kind": "DoubleBuffer", "layer": "sensor",
                                      "source": ["adc_array"], "capacity": "1KB", "ports": 2,
                                      "read_energy": "1pJ", "write_energy": "1pJ", "leakage_power": "1uW"}
    g, hw, m, _ = load_doc(doc)
    t = brute_force_counts(g, hw, m)
    assert t.stage_ops["edge"] == 256
    # the previous frame's element is read alongside the new one
    assert t.memory_reads["line_buffer"] == 512


@given(st.integers(1, 40), st.integers(1, 8))
def test_round_robin_is_balanced(ops, copies):
    tally = round_robin(ops, copies)
    assert sum(tally) == ops
    assert max(tally) - min(tally) <= 1
    assert max(tally) == -(-ops // copies)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 24), st.integers(1, 24), st.integers(1, 4), st.integers(1, 4), st.integers(1, 3),
       st.integers(1, 3))
def test_window_count_matches_closed_form(h, w, kh, kw, sh, sw):
    if kh > h or kw > w:
        return
    oh, ow = (h - kh) // sh + 1, (w - kw) // sw + 1
    s = StageShape((h, w, 1), (oh, ow, 1), (kh, kw), (sh, sw))
    assert len(enumerate_windows(s)) == oh * ow == s.num_windows


def test_too_large_is_refused():
    g, hw, m, _ = design("rhythmic/2d_in.yaml")
    with pytest.raises(TooLarge):
        brute_force_counts(g, hw, m)


def test_binning_verify_clean(binning):
    assert verify(binning) == []


@pytest.mark.parametrize("seed", range(40))
def test_random_designs_agree(seed):
    d = random_design(seed)
    assert verify(d) == []
    t = brute_force_counts(d.graph, d.hardware, d.mapping)
    for st_ in d.graph:
        assert stage_op_count(st_) == t.stage_ops[st_.name]


@pytest.mark.parametrize("seed", range(25))
def test_replay_matches_simulation(seed):
    doc = random_document(random.Random(1000 + seed), max_side=24, single_clock=True)
    for mem in doc["hardware"]["memories"]:
        for k in ("rows", "row_width"):
            mem.pop(k, None)
        mem.update(kind="DoubleBuffer", capacity="1MB", ports=8)
    d = load(doc)
    trace = brute_force_counts(d.graph, d.hardware, d.mapping, replay_cycles=True)
    sim = simulate_digital(d.graph, d.hardware, d.mapping, d.globals.bit_depth)
    assert trace.unit_cycles == sim.unit_cycles
    outputs = [e for e in trace.events if e[2] == "output"]
    for unit, last in trace.unit_cycles.items():
        assert max(c for c, u, _, _ in outputs if u == unit) == last


def test_replay_refuses_mixed_clocks():
    doc = document("binning_edge.yaml")
    g, hw, m, _ = load_doc(doc)
    assert replay(g, hw, m)[0] == {"edge_unit": 260}
    doc = shared_memory_doc()
    doc["hardware"]["digital_units"][1]["clock"] = "50MHz"
    g, hw, m, _ = load_doc(doc)
    with pytest.raises(ValueError):
        replay(g, hw, m)
