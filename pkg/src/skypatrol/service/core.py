"""Workstation-side detection service.

Ingests the patrol feed, cuts it into three 2-minute lanes staggered by
40 seconds, runs the detection pipeline per completed segment, and
publishes results to subscribers. Each lane has its own worker thread, so
lanes detect concurrently while per-lane result order is preserved.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import queue
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

from ..aggregate import AggregationPolicy, aggregate
from ..features import FlightReport, SegmentResult, compute_features
from ..pipeline.config import PipelineConfig
from ..pipeline.render import render_windows
from ..pipeline.tracking import associate
from ..pipeline.transform import compensate, filter_direction
from ..sim.drone import FrameDetections, GpsFix

log = logging.getLogger("skypatrol.service")

VERDICT_COLORS = {"incident": "red", "recurrent": "orange", "normal": "green"}

# classifier: list of image arrays -> list of labels in {0,1,2}
Classifier = Callable[[list[np.ndarray]], list[int]]


@dataclass(frozen=True)
class ServiceConfig:
    username: str = "operator"
    password: str = "change-me"
    checkpoint: str | None = None
    incident_threshold: float = 0.1
    normal_threshold: float = 0.6
    extraction_period: int = 20
    image_mode: str = "monochrome"
    canvas: tuple[int, int] = (160, 128)
    lane_stagger: float = 40.0
    segment_length: float = 120.0
    lane_count: int = 3
    archive_dir: str = "flights"
    host: str = "127.0.0.1"
    port: int = 8700

    @property
    def policy(self) -> AggregationPolicy:
        return AggregationPolicy(self.incident_threshold, self.normal_threshold)

    @property
    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(extraction_period=self.extraction_period,
                              image_mode=self.image_mode,
                              canvas=tuple(self.canvas))

    @staticmethod
    def load(path: str | Path) -> "ServiceConfig":
        raw = yaml.safe_load(Path(path).read_text()) or {}
        if "canvas" in raw:
            raw["canvas"] = tuple(raw["canvas"])
        return ServiceConfig(**raw)


def segment_lanes(t0: float, duration: float, stagger: float = 40.0,
                  segment_length: float = 120.0,
                  lane_count: int = 3) -> list[list[tuple[float, float]]]:
    """Segment spans per lane for a stream of `duration` seconds from t0.

    Lane k starts at t0 + stagger*k and cuts consecutive fixed-length
    segments; only segments fully inside the stream are returned.
    """
    lanes = []
    for k in range(lane_count):
        spans = []
        s = t0 + stagger * k
        while s + segment_length <= t0 + duration + 1e-9:
            spans.append((s, s + segment_length))
            s += segment_length
        lanes.append(spans)
    return lanes


def detect_segment(frames: list[FrameDetections], gps: list[GpsFix],
                   classifier: Classifier, policy: AggregationPolicy,
                   config: PipelineConfig, segment_id: str,
                   time_span: tuple[float, float]) -> SegmentResult:
    """Run the full detection pipeline over one raw segment."""
    t0, t1 = time_span
    g_t = np.array([g.timestamp for g in gps])
    g_mp = np.array([g.milepost for g in gps])
    gps_span = (float(np.interp(t0, g_t, g_mp)), float(np.interp(t1, g_t, g_mp)))
    try:
        tracks = associate(frames, gate_px=config.gate_px,
                           min_track_frames=config.min_track_frames)
        trajs = filter_direction(compensate(tracks, gps, gsd=config.gsd))
        images = render_windows(trajs, config, gps,
                                t_start=math.ceil(t0), t_end=t1)
        labels = classifier([im.pixels for im in images])
        verdict, tau = aggregate(labels, policy)
        result = SegmentResult(segment_id, time_span, gps_span, labels,
                               tau, verdict)
        result.preview = _preview_strip([im.pixels for im in images])
        return result
    except Exception as exc:  # isolate failures to the segment
        log.exception("segment %s failed", segment_id)
        return SegmentResult(segment_id, time_span, gps_span, [],
                             (0.0, 0.0, 0.0), "error", error=str(exc))


def _preview_strip(pixels: list[np.ndarray], max_tiles: int = 8) -> np.ndarray:
    """Horizontal strip of evenly spaced trajectory images, uint8."""
    if not pixels:
        return np.zeros((8, 8), dtype=np.uint8)
    idx = np.unique(np.linspace(0, len(pixels) - 1,
                                min(max_tiles, len(pixels))).astype(int))
    tiles = [np.clip(pixels[i] * 255.0, 0, 255).astype(np.uint8) for i in idx]
    return np.concatenate(tiles, axis=1)


@dataclass
class _LaneState:
    index: int
    next_start: float | None = None
    frames: list[FrameDetections] = field(default_factory=list)
    segment_count: int = 0


class DetectionService:
    """Three-lane staggered segmentation over a live ingested feed.

    Mode machine: idle -> start -> detecting -> pause -> paused -> start
    -> detecting -> stop -> idle. Stream time comes from feed timestamps;
    wall-clock pacing is the replayer's concern.
    """

    def __init__(self, config: ServiceConfig, classifier: Classifier,
                 archive=None):
        self.config = config
        self.classifier = classifier
        self.archive = archive
        self.mode = "idle"
        self.flight: FlightReport | None = None
        self.flight_meta: dict = {}
        self._lanes: list[_LaneState] = []
        self._gps: list[GpsFix] = []
        self._t0: float | None = None
        self._last_ts: float | None = None
        self._last_pub: float | None = None
        self._pause_offset = 0.0
        self._pause_started: float | None = None
        self._resume_pending = False
        self._lock = threading.Lock()
        self._workers: list[threading.Thread] = []
        self._jobs: list[queue.Queue] = []
        self._pending = 0
        self._pending_cv = threading.Condition()
        self._subscribers: list[queue.Queue] = []
        self._seq = 0

    # ── control ──

    def start(self, meta: dict | None = None) -> dict:
        with self._lock:
            if self.mode == "detecting":
                raise StateError("already detecting")
            if self.mode == "paused":
                # lane clocks stay frozen until the first post-resume record
                # arrives; its timestamp fixes the pause gap to skip
                self._resume_pending = self._pause_started is not None
                self.mode = "detecting"
                return self.state()
            flight_id = uuid.uuid4().hex[:12]
            self.flight_meta = dict(meta or {})
            self.flight = FlightReport(flight_id=flight_id, start_time=0.0)
            self.mode = "detecting"
            self._t0 = None
            self._last_ts = None
            self._pause_offset = 0.0
            self._pause_started = None
            self._resume_pending = False
            self._lanes = [_LaneState(k) for k in range(self.config.lane_count)]
            self._start_workers()
            return self.state()

    def pause(self) -> dict:
        with self._lock:
            if self.mode != "detecting":
                raise StateError(f"cannot pause from {self.mode}")
            self.mode = "paused"
            self._pause_started = self._last_ts
            return self.state()

    def stop(self) -> dict:
        with self._lock:
            if self.mode == "idle":
                raise StateError("cannot stop from idle")
            self.mode = "idle"
        self.drain()
        self._stop_workers()
        with self._lock:
            flight = self.flight
            if flight is not None and self.archive is not None:
                self.archive.store(flight, self.flight_meta)
            self.flight = None
            self._lanes = []
            self._gps = []
        return self.state()

    def state(self) -> dict:
        flight = self.flight
        return {
            "mode": self.mode,
            "flight_id": flight.flight_id if flight else None,
            "lanes": [{"lane": ls.index, "segments_completed": ls.segment_count,
                       "next_start": ls.next_start} for ls in self._lanes],
            "last_publication": getattr(self, "_last_pub", None),
        }

    # ── ingest ──

    def ingest(self, record: FrameDetections | GpsFix) -> None:
        jobs: list[tuple[int, str, tuple[float, float],
                         list[FrameDetections]]] = []
        with self._lock:
            if self.mode != "detecting":
                return  # buffered feed during pause is discarded
            ts = record.timestamp
            if self._resume_pending:
                if self._pause_started is not None:
                    self._pause_offset += ts - self._pause_started
                self._pause_started = None
                self._resume_pending = False
            self._last_ts = ts
            t = ts - self._pause_offset
            if self._pause_offset:
                # rebase onto the paused stream clock so stored records line
                # up with segment spans
                record = dataclasses.replace(record, timestamp=t)
            if self._t0 is None:
                self._t0 = t
                if self.flight is not None:
                    self.flight.start_time = ts
                for ls in self._lanes:
                    ls.next_start = self._t0 + self.config.lane_stagger * ls.index
            if isinstance(record, GpsFix):
                self._gps.append(record)
                return
            for ls in self._lanes:
                if t < ls.next_start:
                    continue
                end = ls.next_start + self.config.segment_length
                if t >= end:
                    seg_frames = ls.frames
                    ls.frames = []
                    span = (ls.next_start, end)
                    ls.next_start = end
                    ls.segment_count += 1
                    sid = f"L{ls.index}-{ls.segment_count:03d}"
                    jobs.append((ls.index, sid, span, seg_frames))
                ls.frames.append(record)
        for lane_idx, sid, span, seg_frames in jobs:
            self._submit(lane_idx, sid, span, seg_frames)

    def ingest_line(self, line: str) -> bool:
        from ..sim.drone import parse_feed_line
        try:
            rec = parse_feed_line(line)
        except Exception:
            log.warning("malformed feed line skipped: %.80s", line)
            return False
        self.ingest(rec)
        return True

    # ── detection workers (one per lane keeps per-lane order) ──

    def _start_workers(self) -> None:
        self._stop_workers()
        self._jobs = [queue.Queue() for _ in range(self.config.lane_count)]
        self._workers = []
        for k in range(self.config.lane_count):
            w = threading.Thread(target=self._worker, args=(k,), daemon=True)
            w.start()
            self._workers.append(w)

    def _stop_workers(self) -> None:
        for q in self._jobs:
            q.put(None)
        for w in self._workers:
            w.join(timeout=30)
        self._workers = []
        self._jobs = []

    def _submit(self, lane_idx: int, sid: str, span: tuple[float, float],
                frames: list[FrameDetections]) -> None:
        with self._pending_cv:
            self._pending += 1
        self._jobs[lane_idx].put((sid, span, frames))

    def _worker(self, lane_idx: int) -> None:
        while True:
            item = self._jobs[lane_idx].get()
            if item is None:
                return
            sid, span, frames = item
            try:
                with self._lock:
                    gps = [g for g in self._gps
                           if span[0] - 2 <= g.timestamp <= span[1] + 2]
                result = detect_segment(frames, gps, self.classifier,
                                        self.config.policy,
                                        self.config.pipeline, sid, span)
                self._publish(result)
            finally:
                with self._pending_cv:
                    self._pending -= 1
                    self._pending_cv.notify_all()

    def drain(self, timeout: float = 120.0) -> None:
        """Block until all submitted segments have been published."""
        with self._pending_cv:
            self._pending_cv.wait_for(lambda: self._pending == 0,
                                      timeout=timeout)

    # ── publication ──

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def _publish(self, result: SegmentResult) -> None:
        with self._lock:
            flight = self.flight
            if flight is None:
                return
            flight.segments.append(result)
            flight.segments.sort(key=lambda s: s.time_span[0])
            compute_features(flight, self.config.extraction_period)
            self._seq += 1
            self._last_pub = result.time_span[1]
            event = {
                "seq": self._seq,
                "type": "segment",
                "segment": result.to_json(),
                "color": VERDICT_COLORS.get(result.verdict, "gray"),
                "features": flight_features(flight),
            }
            subs = list(self._subscribers)
        for q in subs:
            q.put(event)


def flight_features(flight: FlightReport) -> dict:
    """Feature block for publication; display precision matches the UI."""
    return {
        "flight_id": flight.flight_id,
        "congestion_length_mi": (None if flight.congestion_length is None
                                 else round(flight.congestion_length, 4)),
        "congestion_span": (None if flight.congestion_span is None
                            else [round(v, 4) for v in flight.congestion_span]),
        "scene_window": (None if flight.scene_window is None
                         else list(flight.scene_window)),
        "scene_segment_id": flight.scene_segment_id,
        "detection_time": flight.detection_time,
        "tail_observation_time": flight.tail_observation_time,
    }


class StateError(RuntimeError):
    """Control command invalid in the current service mode."""
