"""Sliding-window trajectory image rasterization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from skimage.draw import line_aa

from ..units import miles_to_feet
from ..sim.drone import FRAME_WIDTH_PX, GpsFix
from .config import SLIDE_STEP, PipelineConfig
from .transform import Trajectory


@dataclass
class TrajectoryImage:
    window_start: float
    period: int
    # float32 in [0,1]; monochrome (H, W), color (H, W, 3)
    pixels: np.ndarray
    label: int | None = None
    source_segment_id: str | None = None


def _time_color(u: np.ndarray) -> np.ndarray:
    """Stroke hue for color mode: early samples blue, late samples red."""
    u = np.clip(u, 0.0, 1.0)
    return np.stack([u, 0.2 * np.ones_like(u), 1.0 - u], axis=-1)


def render_windows(trajs: list[Trajectory], config: PipelineConfig,
                   gps: list[GpsFix], t_start: float | None = None,
                   t_end: float | None = None) -> list[TrajectoryImage]:
    """One image per 1 s window start over [t_start, t_end - P].

    The x-axis maps the union of drone footprints during the window to the
    canvas width, so a stopped vehicle keeps a fixed canvas position across
    the windows of one segment only up to the footprint drift; the y-axis
    maps the full sensor height.
    """
    config.validate()
    if not gps:
        raise ValueError("GPS stream required for window normalization")
    g_t = np.array([g.timestamp for g in gps])
    g_mp = np.array([g.milepost for g in gps])
    t0 = math.ceil(g_t[0]) if t_start is None else t_start
    t1 = g_t[-1] if t_end is None else t_end
    P = config.extraction_period
    w_px, h_px = config.canvas
    sensor_h_ft = 512 * config.gsd
    span_extra_ft = FRAME_WIDTH_PX * config.gsd

    images: list[TrajectoryImage] = []
    start = t0
    while start + P <= t1 + 1e-9:
        left_ft = miles_to_feet(float(np.interp(start, g_t, g_mp)))
        right_ft = miles_to_feet(float(np.interp(start + P, g_t, g_mp))) + span_extra_ft
        span_ft = max(right_ft - left_ft, 1.0)
        if config.image_mode == "monochrome":
            img = np.zeros((h_px, w_px), dtype=np.float32)
        else:
            img = np.zeros((h_px, w_px, 3), dtype=np.float32)
        for tr in trajs:
            _draw(img, tr, start, P, left_ft, span_ft, sensor_h_ft, config)
        images.append(TrajectoryImage(float(start), P, img))
        start += SLIDE_STEP
    return images


def _draw(img: np.ndarray, tr: Trajectory, t0: float, P: int,
          left_ft: float, span_ft: float, sensor_h_ft: float,
          config: PipelineConfig) -> None:
    m = (tr.t >= t0) & (tr.t <= t0 + P)
    if m.sum() < 1:
        return
    ts, xs, ys = tr.t[m], tr.road_x[m], tr.road_y[m]
    # decimate polyline vertices; endpoints always kept
    if config.vertex_step > 0 and len(ts) > 2:
        step = max(1, int(round(config.vertex_step * 10)))
        keep = np.zeros(len(ts), dtype=bool)
        keep[::step] = True
        keep[-1] = True
        ts, xs, ys = ts[keep], xs[keep], ys[keep]
    h, w = img.shape[:2]
    cx = (xs - left_ft) / span_ft * (w - 1)
    cy = ys / sensor_h_ft * (h - 1)
    cx = np.clip(cx, 0, w - 1)
    cy = np.clip(cy, 0, h - 1)
    color = config.image_mode == "color"
    u = (ts - t0) / P
    if len(ts) == 1:
        r, c = int(round(cy[0])), int(round(cx[0]))
        if color:
            img[r, c] = np.maximum(img[r, c], _time_color(u[:1])[0])
        else:
            img[r, c] = 1.0
        return
    for i in range(len(ts) - 1):
        rr, cc, val = line_aa(int(round(cy[i])), int(round(cx[i])),
                              int(round(cy[i + 1])), int(round(cx[i + 1])))
        if color:
            stroke = _time_color(np.full(len(rr), (u[i] + u[i + 1]) / 2.0))
            img[rr, cc] = np.maximum(img[rr, cc], val[:, None] * stroke)
        else:
            img[rr, cc] = np.maximum(img[rr, cc], val.astype(np.float32))
