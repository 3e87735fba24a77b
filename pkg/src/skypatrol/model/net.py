"""Trajectory-image classifier network.

Three feature blocks, each a multiscale convolution (four parallel kernel
sizes concatenated) followed by channel-then-spatial attention gating and a
stride-2 reduction; then spatial pyramid pooling to a fixed-length vector
and a small dense head over the three traffic-condition classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import torch
import torch.nn as nn
import torch.nn.functional as F

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class ModelConfig:
    input_channels: int = 1
    block_widths: tuple[int, ...] = (32, 64, 128)
    multiscale_kernels: tuple[int, ...] = (1, 3, 5, 7)
    spp_grids: tuple[int, ...] = (1, 2, 4)
    dense_widths: tuple[int, ...] = (256, 64)
    classes: int = 3

    def validate(self) -> None:
        if self.input_channels not in (1, 3):
            raise ValueError("input_channels must be 1 or 3")
        if len(self.multiscale_kernels) != 4:
            raise ValueError("expected 4 multiscale kernel sizes")
        if len(self.spp_grids) != 3:
            raise ValueError("expected 3 pyramid pooling grid scales")
        if len(self.block_widths) != 3:
            raise ValueError("expected 3 feature blocks")
        if any(w % len(self.multiscale_kernels) for w in self.block_widths):
            raise ValueError("block widths must divide evenly across kernels")

    @property
    def feature_length(self) -> int:
        return self.block_widths[-1] * sum(g * g for g in self.spp_grids)

    @property
    def min_input_size(self) -> int:
        # 3 stride-2 reductions, then the finest pyramid grid must fit
        return max(self.spp_grids) * 2 ** len(self.block_widths)


class ChannelAttention(nn.Module):
    """Shared two-layer perceptron over average- and max-pooled channel
    descriptors, sigmoid gate."""

    def __init__(self, channels: int, reduction: int = 8):
        super().__init__()
        hidden = max(channels // reduction, 4)
        self.mlp = nn.Sequential(
            nn.Linear(channels, hidden),
            nn.ReLU(inplace=True),
            nn.Linear(hidden, channels),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        avg = self.mlp(x.mean(dim=(2, 3)))
        mx = self.mlp(x.amax(dim=(2, 3)))
        gate = torch.sigmoid(avg + mx)[:, :, None, None]
        return x * gate


class SpatialAttention(nn.Module):
    """Convolution over stacked channel-wise average/max maps, sigmoid gate."""

    def __init__(self, kernel_size: int = 7):
        super().__init__()
        self.conv = nn.Conv2d(2, 1, kernel_size, padding=kernel_size // 2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        maps = torch.cat([x.mean(dim=1, keepdim=True),
                          x.amax(dim=1, keepdim=True)], dim=1)
        gate = torch.sigmoid(self.conv(maps))
        return x * gate


class Cbam(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.channel = ChannelAttention(channels)
        self.spatial = SpatialAttention()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.spatial(self.channel(x))


class MultiscaleConv(nn.Module):
    """Four parallel convolutions with distinct kernel sizes, each producing
    width/4 channels, concatenated."""

    def __init__(self, in_ch: int, out_ch: int, kernels: tuple[int, ...]):
        super().__init__()
        branch_ch = out_ch // len(kernels)
        self.branches = nn.ModuleList(
            nn.Conv2d(in_ch, branch_ch, k, padding=k // 2) for k in kernels)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.relu(torch.cat([b(x) for b in self.branches], dim=1))


class SpatialPyramidPool(nn.Module):
    """Max pooling to fixed grids, concatenated to a size-independent vector."""

    def __init__(self, grids: tuple[int, ...]):
        super().__init__()
        self.grids = grids

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        parts = [F.adaptive_max_pool2d(x, g).flatten(1) for g in self.grids]
        return torch.cat(parts, dim=1)


class TrafficConditionNet(nn.Module):
    def __init__(self, config: ModelConfig | None = None):
        super().__init__()
        self.config = config or ModelConfig()
        self.config.validate()
        cfg = self.config
        blocks = []
        in_ch = cfg.input_channels
        for width in cfg.block_widths:
            blocks.append(nn.Sequential(
                MultiscaleConv(in_ch, width, cfg.multiscale_kernels),
                Cbam(width),
                nn.Conv2d(width, width, 3, stride=2, padding=1),
                nn.ReLU(inplace=True),
            ))
            in_ch = width
        self.blocks = nn.ModuleList(blocks)
        self.spp = SpatialPyramidPool(cfg.spp_grids)
        dense = []
        d_in = cfg.feature_length
        for w in cfg.dense_widths:
            dense += [nn.Linear(d_in, w), nn.ReLU(inplace=True)]
            d_in = w
        dense.append(nn.Linear(d_in, cfg.classes))
        self.head = nn.Sequential(*dense)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Class logits for a (N, C, H, W) batch."""
        if x.shape[1] != self.config.input_channels:
            raise ValueError(
                f"expected {self.config.input_channels} channels, got {x.shape[1]}")
        if min(x.shape[2], x.shape[3]) < self.config.min_input_size:
            raise ValueError(
                f"input spatial size {tuple(x.shape[2:])} below minimum "
                f"{self.config.min_input_size}")
        for b in self.blocks:
            x = b(x)
        return self.head(self.spp(x))

    def predict_proba(self, x: torch.Tensor) -> torch.Tensor:
        return F.softmax(self.forward(x), dim=1)


def build(config: ModelConfig | None = None) -> TrafficConditionNet:
    return TrafficConditionNet(config)


def save_checkpoint(model: TrafficConditionNet, path: str | Path) -> None:
    payload = {
        "version": CHECKPOINT_VERSION,
        "config": model.config.__dict__,
        "state": model.state_dict(),
        "shapes": {k: list(v.shape) for k, v in model.state_dict().items()},
    }
    torch.save(payload, path)


def load_checkpoint(path: str | Path) -> TrafficConditionNet:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('version')}")
    cfg_kwargs = dict(payload["config"])
    for k in ("block_widths", "multiscale_kernels", "spp_grids", "dense_widths"):
        cfg_kwargs[k] = tuple(cfg_kwargs[k])
    model = TrafficConditionNet(ModelConfig(**cfg_kwargs))
    model.load_state_dict(payload["state"])
    model.eval()
    return model
