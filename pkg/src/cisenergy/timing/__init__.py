"""Digital pipeline simulation, stall detection, and delay allocation."""
from .delay import DigitalTooSlow, OverCommitted, allocate_analog_delay, allocate_cell_delays
from .program import NonDigitalUnit
from .simulate import (
    BACKENDS,
    DEFAULT_BACKEND,
    SimulationError,
    SimulationResult,
    StallCause,
    TimingResult,
    compute_timing,
    detect_stalls,
    memory_access_counts,
    simulate_digital,
)

__all__ = [
    "BACKENDS", "DEFAULT_BACKEND", "DigitalTooSlow", "NonDigitalUnit", "OverCommitted", "SimulationError",
    "SimulationResult", "StallCause", "TimingResult", "allocate_analog_delay", "allocate_cell_delays",
    "compute_timing", "detect_stalls", "memory_access_counts", "simulate_digital",
]
