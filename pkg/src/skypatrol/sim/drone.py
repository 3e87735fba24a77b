"""Drone patrol camera/GPS feed generation.

Nadir camera model: image x-axis aligned with the road axis, fixed frame
size and ground sampling distance, so the footprint is a sliding window of
the road centered on the drone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from ..units import feet_to_miles, miles_to_feet, mph_to_ftps
from .scenario import DronePlan
from .traffic import GroundTruthLog

FRAME_WIDTH_PX = 640
FRAME_HEIGHT_PX = 512
GSD_FT_PER_PX = 0.6
FRAME_RATE = 10.0

# Affine lat/lon anchor so map display works; milepost stays authoritative.
ANCHOR_LAT = 28.19
ANCHOR_LON = -82.35
LAT_PER_MILE = 1.0 / 69.0


@dataclass(frozen=True)
class GpsFix:
    timestamp: float     # seconds (epoch-relative)
    latitude: float
    longitude: float
    milepost: float      # miles along road axis
    altitude: float      # feet


@dataclass(frozen=True)
class FrameDetections:
    frame_index: int
    timestamp: float
    # (vehicle_id or None, x_px, y_px)
    detections: tuple[tuple[int | None, float, float], ...]


@dataclass(frozen=True)
class NoiseModel:
    pixel_sigma: float = 1.0
    miss_probability: float = 0.05
    seed: int = 0

    @staticmethod
    def none() -> "NoiseModel":
        return NoiseModel(pixel_sigma=0.0, miss_probability=0.0)


def milepost_to_latlon(milepost: float) -> tuple[float, float]:
    return ANCHOR_LAT + milepost * LAT_PER_MILE, ANCHOR_LON


def drone_milepost(plan: DronePlan, t: float) -> float:
    """Drone position (miles) at simulation time t."""
    dist_ft = mph_to_ftps(plan.cruise_speed) * (t - plan.start_time)
    return plan.start_milepost + feet_to_miles(dist_ft)


def fly(log: GroundTruthLog, plan: DronePlan,
        noise: NoiseModel | None = None,
        end_time: float | None = None) -> tuple[list[FrameDetections], list[GpsFix]]:
    """Render the patrol pass over a ground-truth log.

    The pass runs from plan.start_time until the drone's footprint leaves the
    road or the log ends (or end_time, if given).
    """
    plan.validate()
    noise = noise if noise is not None else NoiseModel()
    rng = np.random.default_rng(noise.seed)

    half_span_ft = FRAME_WIDTH_PX * GSD_FT_PER_PX / 2.0
    cruise_ftps = mph_to_ftps(plan.cruise_speed)
    t_end = log.duration
    if end_time is not None:
        t_end = min(t_end, end_time)
    # stop once the trailing footprint edge passes the end of the road
    t_road_end = plan.start_time + (
        log.road_length_ft - miles_to_feet(plan.start_milepost) + half_span_ft
    ) / cruise_ftps
    t_end = min(t_end, t_road_end)

    y_center_ft = FRAME_HEIGHT_PX * GSD_FT_PER_PX / 2.0
    lane_w = log.params.lane_width
    lane_count = log.lane_count

    frames: list[FrameDetections] = []
    dt = 1.0 / FRAME_RATE
    n_frames = max(0, int(np.floor((t_end - plan.start_time) / dt)) + 1)
    for fi in range(n_frames):
        t = plan.start_time + fi * dt
        drone_x_ft = miles_to_feet(drone_milepost(plan, t))
        left_ft = drone_x_ft - half_span_ft
        dets: list[tuple[int | None, float, float]] = []
        for vid, (ts, xs, lanes) in log.vehicles.items():
            if t < ts[0] or t > ts[-1]:
                continue
            pos = log.vehicle_position(vid, t)
            if pos is None:
                continue
            x_ft, ln = pos
            if not (left_ft <= x_ft < left_ft + FRAME_WIDTH_PX * GSD_FT_PER_PX):
                continue
            if noise.miss_probability > 0 and rng.random() < noise.miss_probability:
                continue
            y_ft = y_center_ft + (ln - (lane_count - 1) / 2.0) * lane_w
            x_px = (x_ft - left_ft) / GSD_FT_PER_PX
            y_px = y_ft / GSD_FT_PER_PX
            if noise.pixel_sigma > 0:
                x_px += rng.normal(0.0, noise.pixel_sigma)
                y_px += rng.normal(0.0, noise.pixel_sigma)
            if 0 <= x_px < FRAME_WIDTH_PX and 0 <= y_px < FRAME_HEIGHT_PX:
                dets.append((vid, float(x_px), float(y_px)))
        frames.append(FrameDetections(fi, t, tuple(dets)))

    fixes: list[GpsFix] = []
    sec = int(np.ceil(plan.start_time))
    while sec <= t_end:
        mp = drone_milepost(plan, float(sec))
        lat, lon = milepost_to_latlon(mp)
        fixes.append(GpsFix(float(sec), lat, lon, mp, plan.altitude))
        sec += 1
    return frames, fixes


def deproject(x_px: float, gps_milepost: float) -> float:
    """Inverse camera map: detection pixel x -> milepost (miles)."""
    half_span_ft = FRAME_WIDTH_PX * GSD_FT_PER_PX / 2.0
    return gps_milepost + feet_to_miles(x_px * GSD_FT_PER_PX - half_span_ft)


# ── feed serialization: one JSON record per line ──

def frame_to_json(f: FrameDetections) -> str:
    return json.dumps({
        "frame_index": f.frame_index,
        "timestamp": f.timestamp,
        "detections": [[vid, round(x, 3), round(y, 3)]
                       for vid, x, y in f.detections],
    })


def gps_to_json(g: GpsFix) -> str:
    return json.dumps({
        "timestamp": g.timestamp,
        "latitude": round(g.latitude, 7),
        "longitude": round(g.longitude, 7),
        "milepost": round(g.milepost, 6),
        "altitude": g.altitude,
    })


def parse_feed_line(line: str) -> FrameDetections | GpsFix:
    rec = json.loads(line)
    if "frame_index" in rec:
        return FrameDetections(
            rec["frame_index"], rec["timestamp"],
            tuple((d[0], d[1], d[2]) for d in rec["detections"]))
    return GpsFix(rec["timestamp"], rec["latitude"], rec["longitude"],
                  rec["milepost"], rec["altitude"])


def write_feed(out_dir: str | Path, frames: list[FrameDetections],
               fixes: list[GpsFix], truth: dict | None = None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "frames.jsonl", "w") as fh:
        for f in frames:
            fh.write(frame_to_json(f) + "\n")
    with open(out / "gps.jsonl", "w") as fh:
        for g in fixes:
            fh.write(gps_to_json(g) + "\n")
    if truth is not None:
        (out / "truth.json").write_text(json.dumps(truth, indent=1))


def read_feed(feed_dir: str | Path) -> tuple[list[FrameDetections], list[GpsFix]]:
    d = Path(feed_dir)
    frames = [parse_feed_line(ln) for ln in
              (d / "frames.jsonl").read_text().splitlines() if ln.strip()]
    fixes = [parse_feed_line(ln) for ln in
             (d / "gps.jsonl").read_text().splitlines() if ln.strip()]
    return frames, fixes  # type: ignore[return-value]


def truth_sidecar(log: GroundTruthLog) -> dict:
    return {
        "intervals": [[t0, t1, lab] for t0, t1, lab in log.intervals],
        "tail_mile": [None if np.isnan(v) else round(float(v), 5)
                      for v in log.tail_mile],
    }


def interleave_feed(frames: list[FrameDetections],
                    fixes: list[GpsFix]) -> Iterator[FrameDetections | GpsFix]:
    """Merge frame and GPS records into one time-ordered stream."""
    fi = gi = 0
    while fi < len(frames) or gi < len(fixes):
        if gi >= len(fixes) or (fi < len(frames)
                                and frames[fi].timestamp <= fixes[gi].timestamp):
            yield frames[fi]
            fi += 1
        else:
            yield fixes[gi]
            gi += 1
