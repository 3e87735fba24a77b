from __future__ import annotations

import numpy as np
import pytest

from skypatrol.sim import (Condition, DronePlan, NoiseModel, ScenarioSpec,
                           fly, label_windows, simulate)
from skypatrol.sim.drone import (FRAME_WIDTH_PX, GSD_FT_PER_PX, deproject,
                                 drone_milepost, frame_to_json)
from skypatrol.sim.traffic import GroundTruthLog, IdmParams
from skypatrol.units import miles_to_feet


def make_log(vehicles, duration=60.0, intervals=None, lane_count=3,
             road_length_ft=miles_to_feet(1.4)):
    n = int(duration) + 1
    return GroundTruthLog(
        duration=duration, frame_dt=0.1, lane_count=lane_count,
        road_length_ft=road_length_ft, params=IdmParams(), vehicles=vehicles,
        intervals=intervals or [(0.0, duration, 0)],
        tail_mile=np.full(n, np.nan),
        entered_cum=np.zeros(n, dtype=int), exited_cum=np.zeros(n, dtype=int),
        present=np.zeros(n, dtype=int))


def stationary_vehicle(x_ft, lane=1, duration=60.0):
    ts = np.arange(0, duration + 0.05, 0.1)
    return {0: (ts, np.full(len(ts), float(x_ft)),
                np.full(len(ts), lane, dtype=np.int64))}


class TestScenarioValidation:
    def test_rejects_excess_demand(self):
        with pytest.raises(ValueError, match="stable regime"):
            ScenarioSpec(demand_rate=2600).validate()

    def test_rejects_full_closure_with_demand(self):
        spec = ScenarioSpec(condition=Condition.INCIDENT, demand_rate=1000,
                            event_start=0, event_end=100,
                            blocked_lanes=frozenset({0, 1, 2}))
        with pytest.raises(ValueError, match="queue capacity"):
            spec.validate()

    def test_rejects_event_off_road(self):
        spec = ScenarioSpec(condition=Condition.INCIDENT, event_position=2.0,
                            event_start=0, event_end=10,
                            blocked_lanes=frozenset({0}))
        with pytest.raises(ValueError):
            spec.validate()

    def test_rejects_inverted_event_times(self):
        spec = ScenarioSpec(condition=Condition.RECURRENT, event_start=50,
                            event_end=40)
        with pytest.raises(ValueError):
            spec.validate()


class TestSimulate:
    def test_normal_all_labels_zero_tail_undefined(self, normal_log):
        assert normal_log.intervals == [(0.0, 180.0, 0)]
        assert np.isnan(normal_log.tail_mile).all()

    def test_conservation_every_second(self, incident_log):
        n = int(incident_log.duration)
        for s in range(n):
            assert (incident_log.entered_cum[s] - incident_log.exited_cum[s]
                    == incident_log.present[s])

    def test_determinism(self):
        spec = ScenarioSpec(condition=Condition.NORMAL, demand_rate=900, seed=42)
        a = simulate(spec, duration=60)
        b = simulate(spec, duration=60)
        assert set(a.vehicles) == set(b.vehicles)
        for vid in a.vehicles:
            np.testing.assert_array_equal(a.vehicles[vid][1], b.vehicles[vid][1])

    def test_feed_bitwise_identical_for_fixed_seed(self):
        spec = ScenarioSpec(condition=Condition.NORMAL, demand_rate=900, seed=42)
        lines = []
        for _ in range(2):
            log = simulate(spec, duration=40)
            frames, _ = fly(log, DronePlan(), noise=NoiseModel(seed=5))
            lines.append("\n".join(frame_to_json(f) for f in frames))
        assert lines[0] == lines[1]

    def test_incident_labels_start_at_event(self, incident_log):
        assert incident_log.label_at(30) == 0
        assert incident_log.label_at(120) == 2

    def test_recurrent_labels_present(self, recurrent_log):
        labs = {lab for _, _, lab in recurrent_log.intervals}
        assert 1 in labs
        assert 2 not in labs


class TestShockwave:
    def test_tail_moves_upstream(self, incident_log):
        # queue length monotone non-decreasing between consecutive 60 s samples
        samples = [incident_log.tail_mile[s] for s in (120, 180, 240)]
        assert all(np.isfinite(samples))
        assert samples[0] > samples[1] > samples[2]

    def test_tail_against_cumulative_count_oracle(self, incident_log):
        """Queueing-diagram oracle: tail from input/output vehicle counts."""
        event_ft = miles_to_feet(1.0)
        ref_ft = 500.0  # upstream of any queue reached in this run
        p = incident_log.params

        def crossings(point_ft, t):
            n = 0
            for ts, xs, _ in incident_log.vehicles.values():
                i = np.searchsorted(xs, point_ft)  # xs monotone up the road
                if i < len(xs) and ts[min(i, len(ts) - 1)] <= t and xs[-1] >= point_ft:
                    tc = np.interp(point_ft, xs, ts)
                    if tc <= t:
                        n += 1
            return n

        for t in (180.0, 240.0):
            in_queue = crossings(ref_ft, t) - crossings(event_ft, t)
            # storage across all lanes at jam spacing; free-flow vehicles
            # between the reference points add slack, hence the tolerance
            tail_oracle = event_ft - in_queue * p.jam_spacing / incident_log.lane_count
            tail_sim = miles_to_feet(incident_log.tail_mile[int(t)])
            assert abs(tail_sim - tail_oracle) < 1300.0

    def test_recurrent_queue_grows_and_decays(self, recurrent_log):
        # periodic: queue present in some seconds, absent in others, after warmup
        finite = np.isfinite(recurrent_log.tail_mile[60:240])
        assert finite.any()
        labs = [lab for _, _, lab in recurrent_log.intervals]
        assert 1 in labs and 0 in labs


class TestLabelWindows:
    def test_overlap_rule(self):
        log = make_log(stationary_vehicle(100), duration=300,
                       intervals=[(0, 100, 0), (100, 200, 2), (200, 300, 0)])
        labels = dict(label_windows(log, 20))
        assert labels[85.0] == 2   # overlap [100, 105]
        assert labels[79.0] == 0   # window [79, 99] misses the incident
        assert labels[199.0] == 2

    def test_all_normal(self, normal_log):
        assert all(lab == 0 for _, lab in label_windows(normal_log, 5))

    def test_incident_dominates_recurrent(self):
        log = make_log(stationary_vehicle(100), duration=100,
                       intervals=[(0, 40, 1), (40, 60, 2), (60, 100, 0)])
        labels = dict(label_windows(log, 20))
        # brute-force interval-intersection oracle
        for t0, lab in labels.items():
            overlap2 = max(0.0, min(60, t0 + 20) - max(40, t0)) > 0
            overlap1 = max(0.0, min(40, t0 + 20) - max(0, t0)) > 0
            expect = 2 if overlap2 else (1 if overlap1 else 0)
            assert lab == expect

    def test_window_past_end_dropped(self):
        log = make_log(stationary_vehicle(100), duration=30)
        assert len(label_windows(log, 20)) == 11  # starts 0..10

    def test_invalid_period(self, normal_log):
        with pytest.raises(ValueError):
            label_windows(normal_log, 7)


class TestFly:
    def test_cruise_advance(self):
        plan = DronePlan()
        assert miles_to_feet(drone_milepost(plan, 6.0)) == pytest.approx(88.0)

    def test_stationary_vehicle_pixel_rate(self):
        log = make_log(stationary_vehicle(miles_to_feet(0.1)))
        frames, _ = fly(log, DronePlan(), noise=NoiseModel.none())
        xs = {f.timestamp: f.detections[0][1] for f in frames if f.detections}
        ts = sorted(xs)
        rate = (xs[ts[-1]] - xs[ts[0]]) / (ts[-1] - ts[0])
        expected = -DronePlan().cruise_speed * 5280 / 3600 / GSD_FT_PER_PX
        assert rate == pytest.approx(expected, rel=1e-6)

    def test_zero_noise_deprojection_roundtrip(self, normal_log):
        frames, _ = fly(normal_log, DronePlan(), noise=NoiseModel.none())
        plan = DronePlan()
        half_px_ground_mi = GSD_FT_PER_PX / 2 / 5280
        checked = 0
        for f in frames[::100]:
            for vid, x_px, _ in f.detections:
                truth = normal_log.vehicle_position(vid, f.timestamp)[0] / 5280
                got = deproject(x_px, drone_milepost(plan, f.timestamp))
                assert abs(got - truth) <= half_px_ground_mi
                checked += 1
        assert checked > 20

    def test_viewport_completeness_zero_noise(self, normal_log):
        frames, _ = fly(normal_log, DronePlan(), noise=NoiseModel.none())
        plan = DronePlan()
        span_ft = FRAME_WIDTH_PX * GSD_FT_PER_PX
        for f in frames[::250]:
            left = miles_to_feet(drone_milepost(plan, f.timestamp)) - span_ft / 2
            inside = set()
            for vid in normal_log.vehicles:
                pos = normal_log.vehicle_position(vid, f.timestamp)
                if pos and left <= pos[0] < left + span_ft:
                    inside.add(vid)
            assert {d[0] for d in f.detections} == inside

    def test_gps_cadence(self, clean_feed):
        _, fixes = clean_feed
        diffs = np.diff([g.timestamp for g in fixes])
        assert (diffs == 1.0).all()
        mps = [g.milepost for g in fixes]
        assert all(b >= a for a, b in zip(mps, mps[1:]))
