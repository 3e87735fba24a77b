from .config import PipelineConfig
from .tracking import PixelTrack, associate
from .transform import Trajectory, compensate, filter_direction
from .render import TrajectoryImage, render_windows
from .dataset import DatasetSplit, build_dataset, stratified_split

__all__ = [
    "PipelineConfig",
    "PixelTrack",
    "associate",
    "Trajectory",
    "compensate",
    "filter_direction",
    "TrajectoryImage",
    "render_windows",
    "DatasetSplit",
    "build_dataset",
    "stratified_split",
]
