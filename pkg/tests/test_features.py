from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from skypatrol.features import (FlightReport, PropagationEstimate,
                                SegmentResult, compute_features,
                                congestion_length, detection_timestamp,
                                incident_runs, propagation_speed,
                                scene_window, union_length)


def seg(sid, verdict, t0, t1, mp0, mp1, labels=None):
    labels = labels if labels is not None else []
    n = len(labels)
    tau = (labels.count(2) / n, labels.count(1) / n, labels.count(0) / n) \
        if n else (0.0, 0.0, 0.0)
    return SegmentResult(segment_id=sid, time_span=(t0, t1),
                         gps_span=(mp0, mp1), image_labels=labels,
                         tau=tau, verdict=verdict)


def report(segments, flight_id="f1", start_time=0.0):
    return FlightReport(flight_id=flight_id, start_time=start_time,
                        segments=segments)


class TestUnionLength:
    def test_overlapping_spans(self):
        # [1.00, 1.15] u [1.10, 1.26] has measure 0.26
        assert union_length([(1.00, 1.15), (1.10, 1.26)]) == pytest.approx(0.26)

    def test_disjoint_spans(self):
        assert union_length([(0.0, 0.1), (0.5, 0.7)]) == pytest.approx(0.3)

    def test_unordered_and_reversed_endpoints(self):
        assert union_length([(0.7, 0.5), (0.1, 0.0)]) == pytest.approx(0.3)

    def test_empty(self):
        assert union_length([]) == 0.0

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)),
                    min_size=1, max_size=8))
    def test_against_discretized_oracle(self, spans):
        import numpy as np
        grid = np.zeros(10001, dtype=bool)
        for a, b in spans:
            lo, hi = sorted((a, b))
            grid[int(round(lo * 1000)):int(round(hi * 1000))] = True
        assert union_length(spans) == pytest.approx(grid.sum() / 1000, abs=5e-3)


class TestIncidentRuns:
    def test_runs_split_on_other_verdicts(self):
        segs = [seg("a", "incident", 0, 120, 1.0, 1.1),
                seg("b", "incident", 120, 240, 1.1, 1.2),
                seg("c", "normal", 240, 360, 1.2, 1.3),
                seg("d", "incident", 360, 480, 1.3, 1.4)]
        runs = incident_runs(segs)
        assert [[s.segment_id for s in r] for r in runs] == [["a", "b"], ["d"]]

    def test_no_incident(self):
        assert incident_runs([seg("a", "normal", 0, 10, 0, 0.1)]) == []


class TestCongestionLength:
    def test_longest_run_is_primary(self):
        rep = report([
            seg("a", "incident", 0, 120, 1.00, 1.15),
            seg("b", "incident", 120, 240, 1.10, 1.26),
            seg("c", "recurrent", 240, 360, 1.26, 1.35),
            seg("d", "incident", 360, 480, 1.35, 1.40),
        ])
        length, span = congestion_length(rep)
        assert length == pytest.approx(0.26)
        assert span == (1.00, 1.26)
        assert rep.secondary_runs == [(1.35, 1.40)]

    def test_tail_observation_time_interpolated(self):
        rep = report([seg("a", "incident", 100, 220, 1.0, 1.2)])
        congestion_length(rep)
        # tail at milepost 1.0 is the left edge of the only segment
        assert rep.tail_observation_time == pytest.approx(100.0)
        rep2 = report([seg("a", "incident", 100, 220, 0.9, 1.1),
                       seg("b", "incident", 220, 340, 1.1, 1.3)])
        congestion_length(rep2)
        assert rep2.tail_observation_time == pytest.approx(100.0)

    def test_no_incident_clears_fields(self):
        rep = report([seg("a", "normal", 0, 120, 1.0, 1.1)])
        length, span = congestion_length(rep)
        assert length is None and span is None


class TestPropagationSpeed:
    def _rep(self, length_mi, tail_t, fid):
        rep = report([], flight_id=fid, start_time=tail_t)
        rep.congestion_length = length_mi
        rep.tail_observation_time = tail_t
        return rep

    def test_growth_rate(self):
        # 1000 ft grows to 2000 ft over 10 minutes: 100 ft/min upstream
        a = self._rep(1000 / 5280, 0.0, "a")
        b = self._rep(2000 / 5280, 600.0, "b")
        est = propagation_speed(a, b)
        assert est.speed == pytest.approx(100.0)
        assert est.delta_length == pytest.approx(1000.0)
        assert est.delta_time == pytest.approx(10.0)
        assert est.direction == "upstream"

    def test_fractional_worked_example(self):
        a = self._rep(0.1, 30.0, "a")
        b = self._rep(0.1 + 1257.7 / 5280, 30.0 + 12.45 * 60, "b")
        est = propagation_speed(a, b)
        assert est.speed == pytest.approx(1257.7 / 12.45, rel=1e-9)

    def test_shrinking_queue_downstream(self):
        a = self._rep(0.3, 0.0, "a")
        b = self._rep(0.2, 300.0, "b")
        est = propagation_speed(a, b)
        assert est.speed < 0
        assert est.direction == "downstream"

    def test_flight_start_time_base(self):
        a = self._rep(0.1, 50.0, "a")
        b = self._rep(0.2, 500.0, "b")
        a.start_time, b.start_time = 0.0, 600.0
        est = propagation_speed(a, b, time_base="flight_start")
        assert est.delta_time == pytest.approx(10.0)
        with pytest.raises(ValueError):
            propagation_speed(a, b, time_base="midpoint")

    def test_order_enforced(self):
        a = self._rep(0.1, 0.0, "a")
        b = self._rep(0.2, 600.0, "b")
        with pytest.raises(ValueError, match="later"):
            propagation_speed(b, a)

    def test_requires_lengths(self):
        a = self._rep(0.1, 0.0, "a")
        b = report([], flight_id="b")
        with pytest.raises(ValueError, match="congestion length"):
            propagation_speed(a, b)


class TestSceneWindow:
    def test_window_from_longest_image_run(self):
        labels = [0, 0, 0, 2, 2, 2, 2, 1, 2, 2, 0]
        rep = report([seg("a", "incident", 1000.0, 1120.0, 1.0, 1.2, labels)])
        t0, t1, sid = scene_window(rep, period=20)
        # longest run spans image indices 3..6: window [T+3, T+6+P]
        assert (t0, t1) == (1003.0, 1026.0)
        assert sid == "a"

    def test_tie_goes_to_later_run(self):
        labels = [2, 2, 0, 0, 2, 2, 0]
        rep = report([seg("a", "incident", 0.0, 120.0, 1.0, 1.2, labels)])
        t0, t1, _ = scene_window(rep, period=20)
        assert (t0, t1) == (4.0, 25.0)

    def test_uses_last_segment_of_longest_run(self):
        rep = report([
            seg("a", "incident", 0, 120, 1.0, 1.1, [2] * 5),
            seg("b", "incident", 120, 240, 1.1, 1.2, [0, 2, 2, 0]),
            seg("c", "normal", 240, 360, 1.2, 1.3, [0] * 4),
            seg("d", "incident", 360, 480, 1.3, 1.4, [2] * 4),
        ])
        t0, t1, sid = scene_window(rep, period=20)
        assert sid == "b"
        assert (t0, t1) == (121.0, 142.0)

    def test_none_without_incident_images(self):
        rep = report([seg("a", "normal", 0, 120, 1.0, 1.1, [0] * 5)])
        assert scene_window(rep, 20) is None


class TestDetectionTimestamp:
    def test_first_incident_image_of_first_incident_segment(self):
        rep = report([
            seg("a", "normal", 0, 120, 1.0, 1.1, [0, 0, 2, 0]),
            seg("b", "incident", 120, 240, 1.1, 1.2, [0, 0, 0, 2, 2]),
        ])
        assert detection_timestamp(rep) == pytest.approx(123.0)
        assert rep.detection_time == pytest.approx(123.0)

    def test_none_without_incident_segment(self):
        rep = report([seg("a", "recurrent", 0, 120, 1.0, 1.1, [1, 1])])
        assert detection_timestamp(rep) is None


class TestComputeFeatures:
    def test_populates_all_fields(self):
        rep = report([
            seg("a", "incident", 0, 120, 1.00, 1.15, [0, 2, 2, 2]),
            seg("b", "incident", 120, 240, 1.10, 1.26, [2, 2, 0, 0]),
        ])
        compute_features(rep, period=20)
        assert rep.congestion_length == pytest.approx(0.26)
        assert rep.scene_segment_id == "b"
        assert rep.detection_time == pytest.approx(1.0)

    def test_segment_json_excludes_preview(self):
        s = seg("a", "incident", 0, 120, 1.0, 1.1, [2, 0])
        s.preview = object()
        assert "preview" not in s.to_json()
        assert s.to_json()["verdict"] == "incident"
