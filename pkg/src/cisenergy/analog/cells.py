"""Per-cell energy models for the three analog circuit classes."""
import math

import numpy as np

BOLTZMANN = 1.380649e-23  # J/K, exact SI value
DEFAULT_TEMPERATURE = 300.0  # K


class EmptyFoMTable(ValueError):
    pass


def component_access_count(ops, num_component):
    """Activations per component when `ops` spread evenly over `num_component` copies."""
    if num_component < 1:
        raise ValueError("num_component must be >= 1")
    if ops < 0:
        raise ValueError("ops must be >= 0")
    return -(-int(ops) // int(num_component))


def cell_access_count(spatial, temporal):
    if spatial < 1 or temporal < 1:
        raise ValueError("spatial and temporal counts must be >= 1")
    return spatial * temporal


def energy_dynamic_cell(nodes):
    """Sum of C * V^2 over (capacitance, voltage swing) nodes."""
    return sum(c * v * v for c, v in nodes)


def noise_sigma_max(v_swing, resolution_bits):
    """Largest thermal-noise sigma keeping 3 sigma below half an LSB."""
    if resolution_bits < 1:
        raise ValueError("resolution must be >= 1 bit")
    if v_swing <= 0:
        raise ValueError("voltage swing must be > 0")
    return v_swing / (3 * 2 * 2 ** resolution_bits)


def capacitance_for_sigma(sigma, temperature=DEFAULT_TEMPERATURE):
    return BOLTZMANN * temperature / (sigma * sigma)


def capacitance_from_noise(v_swing, resolution_bits, temperature=DEFAULT_TEMPERATURE):
    """Smallest capacitance whose kT/C noise fits the resolution budget."""
    return capacitance_for_sigma(noise_sigma_max(v_swing, resolution_bits), temperature)


def energy_static_direct(c_load, v_swing, v_dda):
    """Bias current charges the load directly, so the time term cancels."""
    return c_load * v_swing * v_dda


def bias_current_gm_id(c_load, gbw, gm_over_id):
    if gbw <= 0 or gm_over_id <= 0:
        raise ValueError("GBW and gm/Id must be > 0")
    return 2 * math.pi * c_load * gbw / gm_over_id


def energy_static_biased(v_dda, i_bias, t_static):
    return v_dda * i_bias * t_static


def fom_lookup(fom_table, sample_rate):
    """Energy per conversion at `sample_rate`, interpolated linearly in log-log space.

    Rates outside the table clamp to the nearest endpoint.
    """
    if not len(fom_table):
        raise EmptyFoMTable("FoM table is empty")
    pts = sorted(fom_table)
    rates = np.log10([r for r, _ in pts])
    energies = np.log10([e for _, e in pts])
    # np.interp clamps at both ends
    return float(10 ** np.interp(math.log10(sample_rate), rates, energies))


def energy_nonlinear_cell(fom_table, sample_rate, n_conversions):
    return fom_lookup(fom_table, sample_rate) * n_conversions
