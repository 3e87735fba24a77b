"""Window labeling against ground-truth condition intervals."""

from __future__ import annotations

from .traffic import GroundTruthLog

VALID_PERIODS = (3, 5, 10, 15, 20)


def label_windows(log: GroundTruthLog, period: int,
                  start: float = 0.0,
                  end: float | None = None) -> list[tuple[float, int]]:
    """One label per 1 s-stepped window [t, t+period].

    A window overlapping an incident interval gets 2; else a recurrent
    overlap gets 1; else 0. Windows running past the log end are dropped.
    """
    if period not in VALID_PERIODS:
        raise ValueError(f"period must be one of {VALID_PERIODS}")
    end = log.duration if end is None else min(end, log.duration)
    out: list[tuple[float, int]] = []
    t = float(start)
    while t + period <= end + 1e-9:
        out.append((t, window_label(log.intervals, t, t + period)))
        t += 1.0
    return out


def window_label(intervals: list[tuple[float, float, int]],
                 t0: float, t1: float) -> int:
    """Dominance order: incident > recurrent > normal."""
    best = 0
    for a, b, lab in intervals:
        if min(b, t1) - max(a, t0) > 0:
            best = max(best, lab)
    return best
