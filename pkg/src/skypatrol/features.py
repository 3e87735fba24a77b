"""Incident feature extraction from classified patrol segments.

Congestion length is the measure of the union of GPS spans of consecutive
incident-verdict segments; propagation speed differentiates that length
between two patrol passes; the scene window is the longest consecutive run
of incident-classified images inside the last segment of the incident run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .units import miles_to_feet


@dataclass
class SegmentResult:
    segment_id: str
    time_span: tuple[float, float]      # seconds
    gps_span: tuple[float, float]       # mileposts, miles
    image_labels: list[int]             # ordered, 1 Hz window starts
    tau: tuple[float, float, float]     # (tau_I, tau_R, tau_N)
    verdict: str                        # incident | recurrent | normal
    error: str | None = None
    preview: object | None = None       # optional uint8 strip raster

    def to_json(self) -> dict:
        return {"segment_id": self.segment_id, "time_span": list(self.time_span),
                "gps_span": [round(v, 6) for v in self.gps_span],
                "image_labels": self.image_labels,
                "tau": [round(v, 6) for v in self.tau],
                "verdict": self.verdict, "error": self.error}


@dataclass
class FlightReport:
    flight_id: str
    start_time: float
    segments: list[SegmentResult] = field(default_factory=list)
    congestion_length: float | None = None       # miles
    congestion_span: tuple[float, float] | None = None
    secondary_runs: list[tuple[float, float]] = field(default_factory=list)
    tail_observation_time: float | None = None
    scene_window: tuple[float, float] | None = None
    scene_segment_id: str | None = None
    detection_time: float | None = None


@dataclass(frozen=True)
class PropagationEstimate:
    flight_pair: tuple[str, str]
    delta_length: float    # feet
    delta_time: float      # minutes
    speed: float           # feet per minute
    direction: str         # upstream | downstream | stationary


def union_length(spans: list[tuple[float, float]]) -> float:
    """Measure of the union of (possibly overlapping) intervals."""
    if not spans:
        return 0.0
    spans = sorted((min(a, b), max(a, b)) for a, b in spans)
    total = 0.0
    cur_a, cur_b = spans[0]
    for a, b in spans[1:]:
        if a > cur_b:
            total += cur_b - cur_a
            cur_a, cur_b = a, b
        else:
            cur_b = max(cur_b, b)
    return total + (cur_b - cur_a)


def incident_runs(segments: list[SegmentResult]) -> list[list[SegmentResult]]:
    """Maximal runs of consecutive incident-verdict segments, in order."""
    runs: list[list[SegmentResult]] = []
    cur: list[SegmentResult] = []
    for seg in segments:
        if seg.verdict == "incident":
            cur.append(seg)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return runs


def congestion_length(report: FlightReport) -> tuple[float | None,
                                                     tuple[float, float] | None]:
    """Primary congestion length (miles) and span; updates the report.

    The longest run is primary; other runs are kept in secondary_runs.
    Also records the time the drone passed the upstream boundary of the
    primary span (the congestion tail), used as the propagation time base.
    """
    runs = incident_runs(report.segments)
    if not runs:
        report.congestion_length = None
        report.congestion_span = None
        return None, None
    measured = []
    for run in runs:
        spans = [seg.gps_span for seg in run]
        lo = min(min(s) for s in spans)
        hi = max(max(s) for s in spans)
        measured.append((union_length(spans), (lo, hi), run))
    measured.sort(key=lambda m: -m[0])
    length, span, primary = measured[0]
    report.congestion_length = length
    report.congestion_span = span
    report.secondary_runs = [m[1] for m in measured[1:]]
    report.tail_observation_time = _time_at_milepost(primary, span[0])
    return length, span


def _time_at_milepost(run: list[SegmentResult], milepost: float) -> float:
    for seg in run:
        lo, hi = sorted(seg.gps_span)
        if lo <= milepost <= hi:
            t0, t1 = seg.time_span
            if hi > lo:
                return t0 + (milepost - lo) / (hi - lo) * (t1 - t0)
            return t0
    return run[0].time_span[0]


def propagation_speed(report_a: FlightReport, report_b: FlightReport,
                      time_base: str = "tail_observation") -> PropagationEstimate:
    """speed = (L_b - L_a) * 5280 / delta_t_minutes.

    time_base 'tail_observation' (default) measures delta_t between the
    moments each flight's drone passed the upstream congestion boundary;
    'flight_start' uses the flights' start times for comparison.
    """
    if report_a.congestion_length is None or report_b.congestion_length is None:
        raise ValueError("both flights need a congestion length")
    if time_base == "tail_observation":
        t_a = report_a.tail_observation_time
        t_b = report_b.tail_observation_time
        if t_a is None or t_b is None:
            raise ValueError("tail observation times unavailable")
    elif time_base == "flight_start":
        t_a, t_b = report_a.start_time, report_b.start_time
    else:
        raise ValueError(f"unknown time_base {time_base!r}")
    if t_b <= t_a:
        raise ValueError("report_b must be later than report_a")
    delta_ft = miles_to_feet(report_b.congestion_length
                             - report_a.congestion_length)
    delta_min = (t_b - t_a) / 60.0
    speed = delta_ft / delta_min
    direction = ("upstream" if delta_ft > 0
                 else "downstream" if delta_ft < 0 else "stationary")
    return PropagationEstimate((report_a.flight_id, report_b.flight_id),
                               delta_ft, delta_min, speed, direction)


def scene_window(report: FlightReport,
                 period: int) -> tuple[float, float, str] | None:
    """Scene time window inside the last segment of the longest incident run.

    The window covers the longest consecutive run of incident-classified
    images; between equal-length runs the later one wins (the drone flies
    with traffic, so the scene sits at the downstream end).
    """
    runs = incident_runs(report.segments)
    if not runs:
        return None
    longest = max(runs, key=len)
    seg = longest[-1]
    best = _longest_label_run(seg.image_labels, 2)
    if best is None:
        return None
    i0, i1 = best
    t_seg = seg.time_span[0]
    window = (t_seg + i0, t_seg + i1 + period)
    report.scene_window = window
    report.scene_segment_id = seg.segment_id
    return window[0], window[1], seg.segment_id


def _longest_label_run(labels: list[int], target: int) -> tuple[int, int] | None:
    """(first, last) indices of the longest run of `target`; later run wins ties."""
    best: tuple[int, int] | None = None
    i = 0
    while i < len(labels):
        if labels[i] != target:
            i += 1
            continue
        j = i
        while j + 1 < len(labels) and labels[j + 1] == target:
            j += 1
        if best is None or (j - i) >= (best[1] - best[0]):
            best = (i, j)
        i = j + 1
    return best


def detection_timestamp(report: FlightReport) -> float | None:
    """Time of the first incident-classified image in the first
    incident-verdict segment: when the system first saw the event."""
    for seg in report.segments:
        if seg.verdict == "incident":
            for i, lab in enumerate(seg.image_labels):
                if lab == 2:
                    t = seg.time_span[0] + i
                    report.detection_time = t
                    return t
    return None


def compute_features(report: FlightReport, period: int) -> FlightReport:
    """Recompute all derived features in place."""
    congestion_length(report)
    scene_window(report, period)
    detection_timestamp(report)
    return report
