from .scenario import Condition, DronePlan, ScenarioSpec, load_scenario
from .traffic import GroundTruthLog, simulate
from .drone import FrameDetections, GpsFix, NoiseModel, fly, write_feed, read_feed
from .labels import label_windows

__all__ = [
    "Condition",
    "DronePlan",
    "ScenarioSpec",
    "load_scenario",
    "GroundTruthLog",
    "simulate",
    "FrameDetections",
    "GpsFix",
    "NoiseModel",
    "fly",
    "write_feed",
    "read_feed",
    "label_windows",
]
