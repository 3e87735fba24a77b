from __future__ import annotations

import pytest

from skypatrol.sim import (Condition, DronePlan, NoiseModel, ScenarioSpec,
                           fly, simulate)


@pytest.fixture(scope="session")
def normal_log():
    return simulate(ScenarioSpec(condition=Condition.NORMAL,
                                 demand_rate=1200, seed=11), duration=180)


@pytest.fixture(scope="session")
def incident_log():
    spec = ScenarioSpec(condition=Condition.INCIDENT, demand_rate=1800,
                        event_position=1.0, event_start=60, event_end=900,
                        blocked_lanes=frozenset({1}), seed=12)
    return simulate(spec, duration=300)


@pytest.fixture(scope="session")
def recurrent_log():
    spec = ScenarioSpec(condition=Condition.RECURRENT, demand_rate=1500,
                        event_position=1.0, event_start=30, event_end=900,
                        signal_cycle=(30.0, 30.0), seed=13)
    return simulate(spec, duration=300)


@pytest.fixture(scope="session")
def clean_feed(normal_log):
    return fly(normal_log, DronePlan(), noise=NoiseModel.none())
