import pytest
from hypothesis import given, strategies as st

from cisenergy.units import UnitError, format_energy, parse_quantity


@pytest.mark.parametrize("text,dim,value", [
    ("100pJ", "energy", 100e-12),
    ("100pJ/B", "energy", 100e-12),
    ("2.5V", "voltage", 2.5),
    ("100MHz", "frequency", 100e6),
    ("33.3ms", "time", 33.3e-3),
    ("10fF", "capacitance", 10e-15),
    ("1uW", "power", 1e-6),
    ("65nm", "length", 65e-9),
    ("2KB", "bytes", 2048),
    ("300K", "temperature", 300.0),
])
def test_parse_quantity(text, dim, value):
    assert parse_quantity(text, dim) == value


@pytest.mark.parametrize("text,dim", [("100", "energy"), ("1V", "energy"), ("abc", "time"), (5, "energy")])
def test_rejects_bare_or_wrong_units(text, dim):
    with pytest.raises(UnitError):
        parse_quantity(text, dim)


@pytest.mark.parametrize("joules,text", [
    (6e-4, "0.60 mJ"), (1.3e-9, "1.30 nJ"), (2.5e-13, "0.25 pJ"), (0.0, "0.00 J"), (3.2e-6, "3.20 µJ"),
])
def test_format_energy(joules, text):
    assert format_energy(joules) == text


@given(st.integers(min_value=1, max_value=10 ** 6))
def test_picojoule_parse_is_exact(n):
    assert parse_quantity(f"{n}pJ", "energy") == float(f"{n}e-12")
