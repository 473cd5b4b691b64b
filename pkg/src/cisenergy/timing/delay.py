"""Frame-rate driven delay budgets for the analog pipeline."""


class DigitalTooSlow(ValueError):
    def __init__(self, t_d, t_fr):
        self.t_d = t_d
        self.t_fr = t_fr
        super().__init__(
            f"digital latency {t_d:.6g} s does not fit the frame time {t_fr:.6g} s; "
            "speed up or restructure the digital pipeline"
        )


class OverCommitted(ValueError):
    pass


def allocate_analog_delay(t_fr, t_d, n_analog):
    """Split the time left after the digital pipeline evenly over the analog slots."""
    if n_analog < 1:
        raise ValueError("need at least one analog slot")
    if t_d >= t_fr:
        raise DigitalTooSlow(t_d, t_fr)
    return (t_fr - t_d) / n_analog


def allocate_cell_delays(t_a, cells):
    """Per-cell delays within one component access.

    Cells with a pinned `delay` keep it; the rest share the remainder evenly.
    Accepts a component or a sequence of cells.
    """
    cells = getattr(cells, "cells", cells)
    if not cells:
        raise ValueError("component has no cells")
    pinned = sum(c.delay for c in cells if c.delay is not None)
    if pinned > t_a:
        raise OverCommitted(f"pinned cell delays {pinned:.6g} s exceed the component budget {t_a:.6g} s")
    free = sum(1 for c in cells if c.delay is None)
    share = (t_a - pinned) / free if free else 0.0
    return [c.delay if c.delay is not None else share for c in cells]


def static_windows(t_a, delays):
    """Time each cell stays biased: the component budget minus the delays of the cells before it."""
    out, elapsed = [], 0.0
    for t in delays:
        out.append(t_a - elapsed)
        elapsed += t
    return out
