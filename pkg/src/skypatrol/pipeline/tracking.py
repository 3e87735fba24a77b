"""Detection-to-track association.

Detections carrying vehicle ids are grouped directly; anonymous detections
are linked frame-to-frame by gated nearest-neighbor matching with short
coasting across missed frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..sim.drone import FRAME_RATE, FrameDetections

MAX_COAST_FRAMES = 2  # >= 3 consecutive misses break a track


@dataclass
class PixelTrack:
    vehicle_id: int | None
    # (t, x_px, y_px), strictly increasing t
    samples: list[tuple[float, float, float]] = field(default_factory=list)

    @property
    def n_frames(self) -> int:
        return len(self.samples)


def associate(frames: list[FrameDetections], gate_px: float = 30.0,
              min_track_frames: int = 3) -> list[PixelTrack]:
    """Build pixel-space tracks from a time-ordered detection stream."""
    if not frames:
        return []
    has_ids = all(d[0] is not None for f in frames for d in f.detections)
    tracks = (_group_by_id(frames) if has_ids
              else _nearest_neighbor(frames, gate_px))
    tracks = [t for t in tracks if t.n_frames >= min_track_frames]
    for t in tracks:
        _fill_single_gaps(t)
    return tracks


def _group_by_id(frames: list[FrameDetections]) -> list[PixelTrack]:
    by_id: dict[int, PixelTrack] = {}
    out: list[PixelTrack] = []
    last_t: dict[int, float] = {}
    gap_limit = (MAX_COAST_FRAMES + 1) / FRAME_RATE + 1e-6
    for f in frames:
        for vid, x, y in f.detections:
            assert vid is not None
            if vid in by_id and f.timestamp - last_t[vid] > gap_limit:
                out.append(by_id.pop(vid))  # long gap splits the track
            tr = by_id.setdefault(vid, PixelTrack(vehicle_id=vid))
            tr.samples.append((f.timestamp, x, y))
            last_t[vid] = f.timestamp
    out.extend(by_id.values())
    return out


def _nearest_neighbor(frames: list[FrameDetections],
                      gate_px: float) -> list[PixelTrack]:
    finished: list[PixelTrack] = []
    # live track state: (track, predicted x, predicted y, vx, vy, misses)
    live: list[list] = []
    for f in frames:
        dets = [(x, y) for _vid, x, y in f.detections]
        unmatched = set(range(len(dets)))
        # candidate pairs sorted by displacement: greedy minimum-total match
        pairs = []
        for ti, st in enumerate(live):
            px, py = st[1], st[2]
            for di in unmatched:
                d = float(np.hypot(dets[di][0] - px, dets[di][1] - py))
                if d <= gate_px:
                    pairs.append((d, ti, di))
        pairs.sort()
        used_t: set[int] = set()
        for d, ti, di in pairs:
            if ti in used_t or di not in unmatched:
                continue
            st = live[ti]
            tr: PixelTrack = st[0]
            x, y = dets[di]
            if tr.samples:
                t_prev, x_prev, y_prev = tr.samples[-1]
                dt = f.timestamp - t_prev
                if dt > 0:
                    st[3] = (x - x_prev) / dt
                    st[4] = (y - y_prev) / dt
            tr.samples.append((f.timestamp, x, y))
            st[1], st[2], st[5] = x, y, 0
            used_t.add(ti)
            unmatched.discard(di)
        # coast or retire unmatched tracks
        next_live = []
        for ti, st in enumerate(live):
            if ti in used_t:
                next_live.append(st)
                continue
            st[5] += 1
            if st[5] > MAX_COAST_FRAMES:
                finished.append(st[0])
            else:
                st[1] += st[3] / FRAME_RATE
                st[2] += st[4] / FRAME_RATE
                next_live.append(st)
        live = next_live
        for di in unmatched:
            x, y = dets[di]
            live.append([PixelTrack(vehicle_id=None,
                                    samples=[(f.timestamp, x, y)]),
                         x, y, 0.0, 0.0, 0])
    finished.extend(st[0] for st in live)
    return finished


def _fill_single_gaps(track: PixelTrack) -> None:
    """Linear interpolation across single-frame misses."""
    if track.n_frames < 2:
        return
    dt = 1.0 / FRAME_RATE
    out = [track.samples[0]]
    for t, x, y in track.samples[1:]:
        t0, x0, y0 = out[-1]
        n_missing = int(round((t - t0) / dt)) - 1
        if n_missing == 1:
            tm = t0 + dt
            out.append((tm, (x0 + x) / 2.0, (y0 + y) / 2.0))
        out.append((t, x, y))
    track.samples = out
