"""Composed scenario shaped like a real patrol afternoon.

A signal-style bottleneck at an off-ramp causes recurrent congestion early
on; a lane-blocking incident starts upstream of the ramp after the first
patrol pass; three passes at 0 / 11 / 23 minutes observe the sequence:
recurrent only, incident with a young queue, incident with a grown queue.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..units import miles_to_feet
from .scenario import DronePlan
from .traffic import GroundTruthLog, LaneBlockage, SignalThrottle, simulate_events

PASS_STARTS = (0.0, 660.0, 1380.0)  # seconds: 0 / 11 / 23 minutes


@dataclass(frozen=True)
class FieldScenario:
    road_length: float = 1.4          # miles
    lane_count: int = 3
    demand_rate: float = 1800.0       # veh/h/lane; exceeds residual capacity
    ramp_position: float = 1.15       # milepost of the signal bottleneck
    incident_position: float = 1.0    # milepost of the crash
    signal_end: float = 600.0         # bottleneck clears before pass 2
    incident_start: float = 700.0     # between pass 1 and pass 2
    duration: float = 1960.0
    seed: int = 7


def build_field_log(sc: FieldScenario | None = None) -> GroundTruthLog:
    sc = sc or FieldScenario()
    events = [
        SignalThrottle(position_ft=miles_to_feet(sc.ramp_position),
                       green_s=22.0, red_s=38.0,
                       start_s=0.0, end_s=sc.signal_end),
        LaneBlockage(position_ft=miles_to_feet(sc.incident_position),
                     start_s=sc.incident_start, end_s=sc.duration,
                     lanes=frozenset({1})),
    ]
    return simulate_events(
        road_length_ft=miles_to_feet(sc.road_length),
        lane_count=sc.lane_count,
        demand_rate=sc.demand_rate,
        events=events,
        duration=sc.duration,
        seed=sc.seed,
    )


def field_plans() -> list[DronePlan]:
    return [DronePlan(start_time=t) for t in PASS_STARTS]
