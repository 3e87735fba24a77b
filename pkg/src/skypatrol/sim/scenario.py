"""Scenario and flight-plan declarations for the freeway patrol simulator."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..units import miles_to_feet

MAX_DEMAND_PER_LANE = 2500.0  # veh/h/lane; above this the entry queue diverges


class Condition(enum.IntEnum):
    """Traffic condition labels: value doubles as the class label."""

    NORMAL = 0
    RECURRENT = 1
    INCIDENT = 2


@dataclass(frozen=True)
class ScenarioSpec:
    """Declarative description of a simulated freeway, demand and event."""

    road_length: float = 1.4          # miles
    lane_count: int = 3
    patrol_direction: int = 1         # +1 along increasing milepost
    demand_rate: float = 1200.0       # veh/h/lane
    condition: Condition = Condition.NORMAL
    event_position: float = 1.0       # milepost, miles
    event_start: float = 0.0          # seconds
    event_end: float = 0.0            # seconds
    blocked_lanes: frozenset[int] = field(default_factory=frozenset)
    signal_cycle: tuple[float, float] = (30.0, 30.0)  # (green s, red s)
    seed: int = 0

    def validate(self) -> None:
        if self.road_length <= 0:
            raise ValueError("road_length must be positive")
        if self.lane_count < 1:
            raise ValueError("lane_count must be >= 1")
        if self.patrol_direction not in (-1, 1):
            raise ValueError("patrol_direction must be +1 or -1")
        if self.demand_rate < 0:
            raise ValueError("demand_rate must be non-negative")
        if self.demand_rate > MAX_DEMAND_PER_LANE:
            raise ValueError(
                f"demand_rate {self.demand_rate} veh/h/lane exceeds the stable "
                f"regime limit of {MAX_DEMAND_PER_LANE}"
            )
        if self.condition is not Condition.NORMAL:
            if not 0.0 <= self.event_position <= self.road_length:
                raise ValueError("event_position must lie on the road")
            if self.event_start >= self.event_end:
                raise ValueError("event_start must precede event_end")
        if self.condition is Condition.INCIDENT:
            if not self.blocked_lanes:
                raise ValueError("incident scenario requires blocked_lanes")
            if not all(0 <= k < self.lane_count for k in self.blocked_lanes):
                raise ValueError("blocked_lanes out of range")
            if len(self.blocked_lanes) == self.lane_count and self.demand_rate > 0:
                raise ValueError(
                    "full closure with nonzero demand exceeds segment queue capacity"
                )
        if self.condition is Condition.RECURRENT:
            g, r = self.signal_cycle
            if g <= 0 or r <= 0:
                raise ValueError("signal_cycle phases must be positive")

    @property
    def road_length_ft(self) -> float:
        return miles_to_feet(self.road_length)

    @property
    def event_position_ft(self) -> float:
        return miles_to_feet(self.event_position)


@dataclass(frozen=True)
class DronePlan:
    """Patrol pass geometry and timing."""

    altitude: float = 200.0       # feet
    cruise_speed: float = 10.0    # mph
    camera_pitch: float = 90.0    # degrees, nadir
    camera_azimuth: float = 90.0  # degrees, image x-axis along road
    start_time: float = 0.0       # seconds into the simulation
    start_milepost: float = 0.0   # miles

    def validate(self) -> None:
        if not 70.0 <= self.camera_pitch <= 90.0:
            raise ValueError("camera_pitch must be within [70, 90] degrees")
        if self.cruise_speed <= 0:
            raise ValueError("cruise_speed must be positive")


def load_scenario(path: str | Path) -> ScenarioSpec:
    """Read a scenario config file (YAML mapping of ScenarioSpec fields)."""
    raw = yaml.safe_load(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError(f"scenario file {path} must contain a mapping")
    if "condition" in raw:
        raw["condition"] = Condition[str(raw["condition"]).upper()]
    if "blocked_lanes" in raw:
        raw["blocked_lanes"] = frozenset(raw["blocked_lanes"])
    if "signal_cycle" in raw:
        raw["signal_cycle"] = tuple(raw["signal_cycle"])
    spec = ScenarioSpec(**raw)
    spec.validate()
    return spec
