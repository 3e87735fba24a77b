"""Trajectory pipeline configuration."""

from __future__ import annotations

from dataclasses import dataclass

VALID_PERIODS = (3, 5, 10, 15, 20)
SLIDE_STEP = 1.0  # seconds, fixed


@dataclass(frozen=True)
class PipelineConfig:
    extraction_period: int = 20              # seconds
    image_mode: str = "monochrome"           # or "color"
    canvas: tuple[int, int] = (160, 128)     # (width_px, height_px)
    direction_epsilon: float = 10.0          # feet
    gsd: float = 0.6                         # ground feet per sensor pixel
    gate_px: float = 30.0                    # association gate radius
    min_track_frames: int = 3
    vertex_step: float = 0.5                 # polyline vertex spacing, seconds

    def validate(self) -> None:
        if self.extraction_period not in VALID_PERIODS:
            raise ValueError(f"extraction_period must be one of {VALID_PERIODS}")
        if self.image_mode not in ("monochrome", "color"):
            raise ValueError("image_mode must be 'monochrome' or 'color'")
        w, h = self.canvas
        if w < 8 or h < 8:
            raise ValueError("canvas too small")

    @property
    def channels(self) -> int:
        return 1 if self.image_mode == "monochrome" else 3
