from .net import (ModelConfig, TrafficConditionNet, build, load_checkpoint,
                  save_checkpoint)
from .train import EarlyStopper, TrainConfig, to_tensors, train
from .metrics import MetricsReport, evaluate, classify, classify_batch
from .sweep import sweep_configs

__all__ = [
    "ModelConfig",
    "TrafficConditionNet",
    "build",
    "load_checkpoint",
    "save_checkpoint",
    "EarlyStopper",
    "TrainConfig",
    "to_tensors",
    "train",
    "MetricsReport",
    "evaluate",
    "classify",
    "classify_batch",
    "sweep_configs",
]
