"""Analog energy: cells, components, and per-frame aggregation."""
from .cells import (
    BOLTZMANN,
    EmptyFoMTable,
    bias_current_gm_id,
    capacitance_from_noise,
    cell_access_count,
    component_access_count,
    energy_dynamic_cell,
    energy_nonlinear_cell,
    energy_static_biased,
    energy_static_direct,
    fom_lookup,
    noise_sigma_max,
)
from .frame import AnalogEnergyBreakdown, analog_frame_energy, component_energy

__all__ = [
    "AnalogEnergyBreakdown", "BOLTZMANN", "EmptyFoMTable", "analog_frame_energy", "bias_current_gm_id",
    "capacitance_from_noise", "cell_access_count", "component_access_count", "component_energy",
    "energy_dynamic_cell", "energy_nonlinear_cell", "energy_static_biased", "energy_static_direct",
    "fom_lookup", "noise_sigma_max",
]
