import math

import pytest
from hypothesis import assume, given, strategies as st

from cisenergy.analog import (
    BOLTZMANN, EmptyFoMTable, analog_frame_energy, bias_current_gm_id, capacitance_from_noise,
    cell_access_count, component_access_count, component_energy, energy_dynamic_cell,
    energy_nonlinear_cell, energy_static_biased, energy_static_direct, noise_sigma_max,
)
from cisenergy.analog.components import build_component
from cisenergy.analog.frame import array_energy, cell_energy
from cisenergy.ir import ACellSpec, AComponentSpec, AnalogArraySpec, CapNode, CellClass, HardwareError
from cisenergy.oracle import brute_force_counts, round_robin
from cisenergy.timing import compute_timing
from conftest import document, load_doc

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
TABLE = ((1e6, 1e-12), (100e6, 10e-12))


# access counting

@pytest.mark.parametrize("ops,n,expected", [(1024, 16, 64), (1024, 1, 1024), (100, 16, 7), (0, 4, 0)])
def test_component_access_count(ops, n, expected):
    assert component_access_count(ops, n) == expected


@given(st.integers(0, 5000), st.integers(1, 300))
def test_access_count_matches_round_robin(ops, n):
    busiest = max(round_robin(ops, n))
    assert component_access_count(ops, n) == busiest


@pytest.mark.parametrize("s,t,expected", [(1, 2, 2), (4, 1, 4), (3, 5, 15)])
def test_cell_access_count(s, t, expected):
    assert cell_access_count(s, t) == expected


# dynamic cells

def test_dynamic_examples():
    assert energy_dynamic_cell([(100e-15, 1.0)]) == 100e-15
    assert energy_dynamic_cell([(100e-15, 1.0), (50e-15, 0.5)]) == pytest.approx(112.5e-15, rel=1e-12)
    assert energy_dynamic_cell([]) == 0


@given(pos, pos, pos)
def test_dynamic_linear_in_c_quadratic_in_v(c, v, k):
    c, base = c * 1e-15, energy_dynamic_cell([(c * 1e-15, v)])
    assert energy_dynamic_cell([(c * k, v)]) == pytest.approx(k * base, rel=1e-12)
    assert energy_dynamic_cell([(c, v * k)]) == pytest.approx(k * k * base, rel=1e-12)


# noise sizing

def test_noise_examples():
    assert noise_sigma_max(1.0, 8) == pytest.approx(0.651e-3, rel=1e-3)
    assert capacitance_from_noise(1.0, 8, 300) == pytest.approx(9.77e-15, rel=1e-3)
    assert noise_sigma_max(1.0, 1) == pytest.approx(83.3e-3, rel=1e-3)
    assert capacitance_from_noise(1.0, 1, 300) == pytest.approx(0.60e-18, rel=1e-2)
    assert capacitance_from_noise(2.0, 8, 300) == pytest.approx(capacitance_from_noise(1.0, 8, 300) / 4, rel=1e-12)


@given(st.floats(0.05, 5.0), st.integers(1, 16), st.floats(200.0, 400.0))
def test_noise_identity(v, bits, temp):
    c = capacitance_from_noise(v, bits, temp)
    assert c * noise_sigma_max(v, bits) ** 2 == pytest.approx(BOLTZMANN * temp, rel=1e-12)


def test_fewer_bits_smaller_capacitor():
    caps = [capacitance_from_noise(1.0, b) for b in range(1, 17)]
    assert all(a < b for a, b in zip(caps, caps[1:]))


def test_node_sized_from_resolution():
    node = CapNode(voltage_swing=1.0, resolution_bits=8)
    cell = ACellSpec("caps", CellClass.DYNAMIC, nodes=(node,))
    assert cell_energy(cell, 1e-6, 1e-6) == pytest.approx(capacitance_from_noise(1.0, 8), rel=1e-12)
    override = ACellSpec("caps", CellClass.DYNAMIC, nodes=(CapNode(1.0, resolution_bits=8, noise_sigma=2.6e-3),))
    assert cell_energy(override, 1e-6, 1e-6) == pytest.approx(BOLTZMANN * 300 / 2.6e-3 ** 2, rel=1e-12)


# static cells

def test_static_direct_examples():
    assert energy_static_direct(100e-15, 1.0, 2.5) == pytest.approx(250e-15, rel=1e-12)
    assert energy_static_direct(1e-12, 0.5, 1.8) == pytest.approx(900e-15, rel=1e-12)


@given(st.floats(1e-9, 1.0))
def test_static_direct_ignores_time(t):
    cell = ACellSpec("sf", CellClass.STATIC_DIRECT, load_capacitance=100e-15, voltage_swing=1.0, supply=2.5)
    assert cell_energy(cell, t, t) == cell_energy(cell, 1e-3, 1e-3)


def test_gm_id_examples():
    assert bias_current_gm_id(1e-12, 10e6, 15) == pytest.approx(4.19e-6, rel=1e-3)
    assert bias_current_gm_id(1e-12, 10e6, 20) == pytest.approx(bias_current_gm_id(1e-12, 10e6, 10) / 2, rel=1e-12)
    assert bias_current_gm_id(1e-30, 10e6, 15) < 1e-20
    assert energy_static_biased(2.5, 4.19e-6, 1e-6) == pytest.approx(10.5e-12, rel=2e-3)
    assert energy_static_biased(2.5, 4.19e-6, 0.0) == 0


def test_gm_id_range_enforced():
    with pytest.raises(HardwareError):
        ACellSpec("amp", CellClass.STATIC_GMID, load_capacitance=1e-12, gm_over_id=25, supply=2.5)
    ACellSpec("amp", CellClass.STATIC_GMID, load_capacitance=1e-12, gm_over_id=25, supply=2.5,
              allow_gm_id_out_of_range=True)


@given(st.floats(1e-7, 1e-1), st.integers(1, 6))
def test_gm_id_energy_invariant_to_even_split(t_a, k):
    amp = ACellSpec("amp", CellClass.STATIC_GMID, load_capacitance=200e-15, gm_over_id=15, supply=2.5)
    comp = AComponentSpec("c", "Add", (amp,) * k, "Voltage", "Voltage")
    assert component_energy(comp, t_a) == pytest.approx(component_energy(comp, 1e-3), rel=1e-10)


# non-linear cells

def test_nonlinear_examples():
    assert energy_nonlinear_cell(((1e6, 1e-12),), 5e7, 1000) == pytest.approx(1e-9, rel=1e-12)
    assert energy_nonlinear_cell(TABLE, 10e6, 1) == pytest.approx(10 ** -11.5, rel=1e-9)
    assert energy_nonlinear_cell(TABLE, 1e3, 1) == pytest.approx(1e-12, rel=1e-12)
    assert energy_nonlinear_cell(TABLE, 1e10, 1) == pytest.approx(10e-12, rel=1e-12)
    with pytest.raises(EmptyFoMTable):
        energy_nonlinear_cell((), 1e6, 1)


@given(st.floats(1e3, 1e10), st.floats(1e3, 1e10))
def test_fom_lookup_monotone_for_rising_table(r1, r2):
    assume(r1 <= r2)
    assert energy_nonlinear_cell(TABLE, r1, 1) <= energy_nonlinear_cell(TABLE, r2, 1)


# components and arrays

def test_single_dynamic_component():
    cell = ACellSpec("c", CellClass.DYNAMIC, nodes=(CapNode(1.0, 100e-15),))
    comp = AComponentSpec("c", "Scaling", (cell,), "Voltage", "Voltage")
    assert component_energy(comp, 1e-6) == 100e-15


def test_aps4t_counts_source_follower_twice():
    comp = build_component("APS4T", 2.5, "test")
    sf = next(c for c in comp.cells if c.cell_class is CellClass.STATIC_DIRECT)
    assert sf.temporal_count == 2
    total = component_energy(comp, 1e-6)
    others = sum(cell_energy(c, 1e-6, 1e-6) for c in comp.cells if c is not sf)
    assert total == pytest.approx(others + 2 * cell_energy(sf, 1e-6, 1e-6), rel=1e-12)


def test_mac_has_dynamic_and_gm_id_terms():
    comp = build_component("MAC", 2.5, "test")
    classes = [c.cell_class for c in comp.cells]
    assert classes == [CellClass.DYNAMIC, CellClass.STATIC_GMID]


def test_default_swing_is_supply_minus_headroom():
    comp = build_component("APS4T", 2.5, "test")
    pd = comp.cells[0]
    assert pd.nodes[0].voltage_swing == pytest.approx(2.2)
    mac = build_component("MAC", 2.5, "test")
    assert mac.cells[0].nodes[0].voltage_swing == pytest.approx(1.9)


def test_binning_adc_conversions(binning):
    g, hw, m, glob = binning
    t = compute_timing(g, hw, m, 30)
    e = analog_frame_energy(hw, m, g, t)
    adc = e.arrays["adc_array"].components[0]
    assert adc.num_component * adc.accesses == 256
    trace = brute_force_counts(g, hw, m)
    assert trace.afa_accesses["adc_array"]["ADC"] == adc.accesses
    assert set(e.arrays) == {"pixel_array", "adc_array"}
    assert e.total == sum(a.energy for a in e.arrays.values())
    assert all(c.energy >= 0 for a in e.arrays.values() for c in a.components)


def test_doubling_components_keeps_array_energy():
    comp = build_component("APS4T", 2.5, "test")
    def arr(n):
        return AnalogArraySpec("p", ((comp, n),), (32, 32, 1), (1, 32, 1), "Charge", "Voltage")
    a, b = array_energy(arr(64), 1024, 1e-2), array_energy(arr(128), 1024, 1e-2)
    assert b.components[0].accesses * 2 == a.components[0].accesses
    assert b.energy == pytest.approx(a.energy, rel=1e-12)


def test_zero_ops_zero_energy():
    comp = build_component("ADC", 2.5, "test")
    arr = AnalogArraySpec("a", ((comp, 4),), (1, 4, 1), (1, 4, 1), "Voltage", "Digital")
    assert array_energy(arr, 0, 1e-3).energy == 0


def test_analog_memory_array_charged_for_pass_through():
    doc = document("binning_edge.yaml")
    arrays = doc["hardware"]["analog_arrays"]
    arrays.insert(1, {"name": "hold", "source": ["pixel_array"], "num_input": [1, 16, 1], "num_output": [1, 16, 1],
                      "input_domain": "Voltage", "output_domain": "Voltage",
                      "components": [{"kind": "SampleHold", "count": 16}]})
    arrays[2]["source"] = ["hold"]
    d = load_doc(doc)
    trace = brute_force_counts(d.graph, d.hardware, d.mapping)
    assert trace.afa_ops["hold"] == 256
    assert trace.afa_accesses["hold"]["SampleHold"] == 16
