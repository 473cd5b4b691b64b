"""Parsing and formatting of unit-annotated quantities.

Design documents carry every physical value as a string with an SI prefix
and a unit symbol ("100pJ", "33.3ms", "10fF"). Bare numbers are rejected for
dimensional fields.
"""
import re

# prefix -> power of ten
PREFIXES = {
    "a": -18,
    "f": -15,
    "p": -12,
    "n": -9,
    "u": -6,
    "µ": -6,
    "m": -3,
    "": 0,
    "k": 3,
    "K": 3,
    "M": 6,
    "G": 9,
    "T": 12,
}

# symbol -> dimension name
SYMBOLS = {
    "J": "energy",
    "F": "capacitance",
    "V": "voltage",
    "A": "current",
    "W": "power",
    "s": "time",
    "Hz": "frequency",
    "K": "temperature",
    "m": "length",
    "B": "bytes",
    "m^2": "area",
    "m2": "area",
}

# trailing per-unit qualifiers that do not change the dimension
_QUALIFIERS = ("/B", "/byte", "/cycle", "/access", "/conv", "/conversion", "/op")

_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*?)?\s*$")


class UnitError(ValueError):
    pass


_BINARY_BYTES = {"B": 1, "KB": 1024, "KiB": 1024, "MB": 1024 ** 2, "MiB": 1024 ** 2, "GB": 1024 ** 3}


def _split_unit(text):
    for qual in _QUALIFIERS:
        if text.endswith(qual):
            text = text[: -len(qual)]
            break
    # memory capacities follow the binary convention
    if text in _BINARY_BYTES:
        return _BINARY_BYTES[text], "bytes"
    # try longest symbols first so "m^2" beats "m" and "Hz" beats nothing
    for sym in sorted(SYMBOLS, key=len, reverse=True):
        if text.endswith(sym):
            prefix = text[: -len(sym)]
            if prefix in PREFIXES:
                # "mm^2" is (mm)^2, not milli-(m^2)
                if SYMBOLS[sym] == "area":
                    return f"e{2 * PREFIXES[prefix]}", "area"
                return f"e{PREFIXES[prefix]}", SYMBOLS[sym]
    raise UnitError(f"unknown unit {text!r}")


def parse_quantity(value, dimension):
    """Parse ``value`` ("2.5V", "100 pJ") and return it in SI base units.

    Raises UnitError when the value is a bare number, has an unknown unit, or
    the unit does not match ``dimension``.
    """
    if isinstance(value, bool) or not isinstance(value, str):
        raise UnitError(f"expected a {dimension} with a unit annotation, got bare value {value!r}")
    m = _QTY.match(value)
    if not m or not m.group(2):
        raise UnitError(f"expected a {dimension} with a unit annotation, got {value!r}")
    unit = m.group(2).strip()
    scale, dim = _split_unit(unit)
    if dim != dimension:
        raise UnitError(f"{value!r} is a {dim}, expected a {dimension}")
    if isinstance(scale, int):
        return float(m.group(1)) * scale
    # shift the decimal exponent instead of multiplying so "10fF" is exactly 1e-14
    mantissa, _, exp = m.group(1).lower().partition("e")
    return float(f"{mantissa}e{int(exp or 0) + int(scale[1:])}")


_FORMAT_PREFIXES = [(1e-18, "a"), (1e-15, "f"), (1e-12, "p"), (1e-9, "n"), (1e-6, "µ"), (1e-3, "m"), (1.0, "")]


def format_energy(joules):
    """Human-readable energy. Values from 0.1 of a prefix step upward keep that prefix."""
    if joules == 0:
        return "0.00 J"
    mag = abs(joules)
    for scale, prefix in reversed(_FORMAT_PREFIXES):
        if mag >= 0.1 * scale:
            return f"{joules / scale:.2f} {prefix}J"
    return f"{joules / 1e-18:.2f} aJ"
