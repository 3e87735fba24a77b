"""Drone-motion compensation and direction filtering."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..units import miles_to_feet
from ..sim.drone import GpsFix
from .tracking import PixelTrack

log = logging.getLogger(__name__)


@dataclass
class Trajectory:
    """Motion-compensated samples in the road frame (feet)."""

    vehicle_id: int | None
    t: np.ndarray       # seconds, strictly increasing
    road_x: np.ndarray  # feet along road
    road_y: np.ndarray  # feet across road

    @property
    def net_displacement(self) -> float:
        return float(self.road_x[-1] - self.road_x[0])


def compensate(tracks: list[PixelTrack], gps: list[GpsFix],
               gsd: float = 0.6) -> list[Trajectory]:
    """road_x(t) = x_px(t)*gsd + drone_milepost(t)*5280, milepost
    linearly interpolated between 1 Hz fixes."""
    if not gps:
        raise ValueError("GPS stream is empty")
    g_t = np.array([g.timestamp for g in gps])
    g_mp = np.array([g.milepost for g in gps])
    out: list[Trajectory] = []
    for tr in tracks:
        ts = np.array([s[0] for s in tr.samples])
        if ts[0] < g_t[0] - 1.0 or ts[-1] > g_t[-1] + 1.0:
            log.warning("track %s outside GPS coverage [%s, %s]; rejected",
                        tr.vehicle_id, g_t[0], g_t[-1])
            continue
        xs = np.array([s[1] for s in tr.samples])
        ys = np.array([s[2] for s in tr.samples])
        drone_ft = miles_to_feet(np.interp(ts, g_t, g_mp))
        out.append(Trajectory(tr.vehicle_id, ts, xs * gsd + drone_ft, ys * gsd))
    return out


def filter_direction(trajs: list[Trajectory], patrol_direction: int = 1,
                     epsilon: float = 10.0) -> list[Trajectory]:
    """Drop opposing-direction trajectories.

    A trajectory is opposing if its net along-road displacement is below
    -epsilon in the patrol direction. Stationary trajectories are kept:
    stopped vehicles are incident evidence.
    """
    return [tr for tr in trajs
            if tr.net_displacement * patrol_direction >= -epsilon]
