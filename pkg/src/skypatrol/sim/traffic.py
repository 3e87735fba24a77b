"""Freeway traffic microsimulation.

Longitudinal motion follows Intelligent-Driver-Model dynamics with an
incentive/safety lane-change rule. Events (lane blockages, signal-style
throttles) are modeled as stationary virtual leaders, which is enough to
reproduce upstream queue growth and shockwave propagation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..units import mph_to_ftps, feet_to_miles
from .scenario import Condition, ScenarioSpec


@dataclass(frozen=True)
class IdmParams:
    """Car-following parameters, feet/seconds."""

    desired_speed: float = mph_to_ftps(70.0)   # ft/s
    time_headway: float = 1.2                  # s
    max_accel: float = 4.5                     # ft/s^2
    comfort_decel: float = 6.6                 # ft/s^2
    min_gap: float = 8.0                       # ft
    vehicle_length: float = 16.0               # ft
    accel_exponent: float = 4.0
    lane_width: float = 12.0                   # ft

    @property
    def jam_spacing(self) -> float:
        return self.min_gap + self.vehicle_length


@dataclass(frozen=True)
class LaneBlockage:
    """Stationary obstruction in specific lanes (incident)."""

    position_ft: float
    start_s: float
    end_s: float
    lanes: frozenset[int]

    def active(self, t: float) -> bool:
        return self.start_s <= t < self.end_s

    def blocks(self, t: float, lane: int) -> bool:
        return self.active(t) and lane in self.lanes


@dataclass(frozen=True)
class SignalThrottle:
    """All-lane periodic stop at a position (recurrent bottleneck)."""

    position_ft: float
    green_s: float
    red_s: float
    start_s: float
    end_s: float

    def active(self, t: float) -> bool:
        return self.start_s <= t < self.end_s

    def blocks(self, t: float, lane: int) -> bool:
        if not self.active(t):
            return False
        phase = (t - self.start_s) % (self.green_s + self.red_s)
        return phase >= self.green_s


@dataclass
class GroundTruthLog:
    """World-truth output of one simulation run."""

    duration: float
    frame_dt: float
    lane_count: int
    road_length_ft: float
    params: IdmParams
    # per-vehicle trajectories: id -> (t, x_ft, lane)
    vehicles: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]]
    # contiguous labeled condition intervals covering [0, duration]
    intervals: list[tuple[float, float, int]]
    # per-second queue tail milepost (nan where no queue)
    tail_mile: np.ndarray
    # per-second conservation counters
    entered_cum: np.ndarray
    exited_cum: np.ndarray
    present: np.ndarray
    events: list = field(default_factory=list)

    def label_at(self, t: float) -> int:
        for t0, t1, lab in self.intervals:
            if t0 <= t < t1:
                return lab
        return 0

    def vehicle_position(self, vid: int, t: float) -> tuple[float, float] | None:
        """Interpolated (x_ft, lane) of a vehicle at time t, None if absent."""
        ts, xs, lanes = self.vehicles[vid]
        if t < ts[0] or t > ts[-1]:
            return None
        i = int(np.searchsorted(ts, t, side="right")) - 1
        if i >= len(ts) - 1:
            return float(xs[-1]), float(lanes[-1])
        w = (t - ts[i]) / (ts[i + 1] - ts[i])
        return float(xs[i] * (1 - w) + xs[i + 1] * w), float(lanes[i])


def events_from_spec(spec: ScenarioSpec) -> list:
    if spec.condition is Condition.INCIDENT:
        return [LaneBlockage(spec.event_position_ft, spec.event_start,
                             spec.event_end, frozenset(spec.blocked_lanes))]
    if spec.condition is Condition.RECURRENT:
        g, r = spec.signal_cycle
        return [SignalThrottle(spec.event_position_ft, g, r,
                               spec.event_start, spec.event_end)]
    return []


def simulate(spec: ScenarioSpec, duration: float = 300.0,
             frame_dt: float = 0.1, params: IdmParams | None = None) -> GroundTruthLog:
    """Run one scenario; deterministic for a fixed spec (incl. seed)."""
    spec.validate()
    return simulate_events(
        road_length_ft=spec.road_length_ft,
        lane_count=spec.lane_count,
        demand_rate=spec.demand_rate,
        events=events_from_spec(spec),
        duration=duration,
        seed=spec.seed,
        frame_dt=frame_dt,
        params=params,
    )


def simulate_events(road_length_ft: float, lane_count: int, demand_rate: float,
                    events: list, duration: float, seed: int,
                    frame_dt: float = 0.1,
                    params: IdmParams | None = None) -> GroundTruthLog:
    """Event-level entry point; lets callers compose multiple bottlenecks."""
    p = params or IdmParams()
    rng = np.random.default_rng(seed)
    n_steps = int(round(duration / frame_dt))
    lc_every = max(1, int(round(0.5 / frame_dt)))

    # Vehicle state, grown on demand.
    cap = 64
    x = np.zeros(cap)
    v = np.zeros(cap)
    lane = np.zeros(cap, dtype=np.int64)
    vdes = np.zeros(cap)
    alive = np.zeros(cap, dtype=bool)
    n_vehicles = 0

    # Trajectory recording buffers (per vehicle, python lists of arrays at end).
    rec_t: list[list[float]] = []
    rec_x: list[list[float]] = []
    rec_lane: list[list[int]] = []

    def new_vehicle(x0: float, v0: float, lane0: int) -> int:
        nonlocal cap, x, v, lane, vdes, alive, n_vehicles
        if n_vehicles == cap:
            cap *= 2
            x = np.resize(x, cap)
            v = np.resize(v, cap)
            lane = np.resize(lane, cap)
            vdes = np.resize(vdes, cap)
            alive2 = np.zeros(cap, dtype=bool)
            alive2[:n_vehicles] = alive[:n_vehicles]
            alive = alive2
        i = n_vehicles
        x[i], v[i], lane[i] = x0, v0, lane0
        vdes[i] = p.desired_speed * rng.uniform(0.92, 1.08)
        alive[i] = True
        rec_t.append([])
        rec_x.append([])
        rec_lane.append([])
        n_vehicles += 1
        return i

    # Warm start: populate the road near free-flow equilibrium.
    mean_speed = p.desired_speed
    flow = demand_rate / 3600.0  # veh/s/lane
    mean_spacing = mean_speed / flow if flow > 0 else math.inf
    for k in range(lane_count):
        pos = rng.uniform(0, min(mean_spacing, road_length_ft))
        while pos < road_length_ft:
            new_vehicle(pos, mean_speed * rng.uniform(0.9, 1.0), k)
            pos += max(p.jam_spacing * 1.5, rng.exponential(mean_spacing))

    # Pre-drawn arrival schedules per lane.
    arrivals: list[list[float]] = []
    for k in range(lane_count):
        ts: list[float] = []
        t_next = rng.exponential(1.0 / flow) if flow > 0 else math.inf
        while t_next < duration:
            ts.append(t_next)
            t_next += rng.exponential(1.0 / flow)
        arrivals.append(ts)
    arrival_idx = [0] * lane_count

    entered = exited = 0
    n_sec = int(math.ceil(duration)) + 1
    entered_cum = np.zeros(n_sec, dtype=np.int64)
    exited_cum = np.zeros(n_sec, dtype=np.int64)
    present = np.zeros(n_sec, dtype=np.int64)
    tail_mile = np.full(n_sec, np.nan)
    signal_queue = np.zeros(n_sec, dtype=bool)
    incident_queue = np.zeros(n_sec, dtype=bool)

    entered += int(alive.sum())  # warm-start vehicles count as entered

    stop_speed = 10.0  # ft/s; below this a vehicle counts as queued

    def idm_accel(vi: np.ndarray, vd: np.ndarray, gap: np.ndarray,
                  dv: np.ndarray) -> np.ndarray:
        gap = np.maximum(gap, 0.1)
        s_star = p.min_gap + np.maximum(
            0.0, vi * p.time_headway + vi * dv / (2.0 * math.sqrt(p.max_accel * p.comfort_decel)))
        return p.max_accel * (1.0 - (vi / vd) ** p.accel_exponent - (s_star / gap) ** 2)

    def leader_terms(ids: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Gap and closing speed to the effective leader for lane-sorted ids."""
        xs = x[ids]
        gap = np.full(len(ids), 1e6)
        dv = np.zeros(len(ids))
        if len(ids) > 1:
            gap[:-1] = xs[1:] - xs[:-1] - p.vehicle_length
            dv[:-1] = v[ids[:-1]] - v[ids[1:]]
        ln = int(lane[ids[0]]) if len(ids) else 0
        for ev in events:
            if ev.blocks(t, ln):
                ahead = ev.position_ft - xs
                m = ahead > 0
                obs_gap = np.where(m, ahead - p.vehicle_length / 2.0, 1e6)
                closer = obs_gap < gap
                dv = np.where(closer, v[ids], dv)
                gap = np.minimum(gap, obs_gap)
        return gap, dv

    def lane_sorted(k: int) -> np.ndarray:
        ids = np.nonzero(alive[:n_vehicles] & (lane[:n_vehicles] == k))[0]
        return ids[np.argsort(x[ids], kind="stable")]

    for step in range(n_steps):
        t = step * frame_dt

        # Record frame samples.
        live = np.nonzero(alive[:n_vehicles])[0]
        for i in live:
            rec_t[i].append(t)
            rec_x[i].append(float(x[i]))
            rec_lane[i].append(int(lane[i]))

        # Entries: place scheduled arrivals when there is room at x=0.
        for k in range(lane_count):
            sched = arrivals[k]
            while arrival_idx[k] < len(sched) and sched[arrival_idx[k]] <= t:
                ids = lane_sorted(k)
                room = True
                if len(ids):
                    first = x[ids[0]]
                    if first < p.jam_spacing * 2.0:
                        room = False
                if not room:
                    break  # blocked entry waits; retried next step
                entry_v = mean_speed * 0.85
                if len(ids) and x[ids[0]] < entry_v * p.time_headway * 2:
                    entry_v = min(entry_v, float(v[ids[0]]))
                new_vehicle(0.0, entry_v, k)
                entered += 1
                arrival_idx[k] += 1

        # Lane changes (mandatory out of blocked lanes, else incentive-based).
        if step % lc_every == 0:
            sorted_ids = {k: lane_sorted(k) for k in range(lane_count)}
            gaps = {}
            for k, ids in sorted_ids.items():
                if len(ids):
                    gaps[k] = leader_terms(ids, t)
            for k in range(lane_count):
                ids = sorted_ids[k]
                if not len(ids):
                    continue
                gap_k, dv_k = gaps[k]
                for pos_i in range(len(ids)):
                    i = ids[pos_i]
                    mandatory = any(
                        ev.blocks(t, k) and 0 < ev.position_ft - x[i] < 900.0
                        and isinstance(ev, LaneBlockage)
                        for ev in events)
                    acc_cur = idm_accel(v[i:i + 1], vdes[i:i + 1],
                                        gap_k[pos_i:pos_i + 1],
                                        dv_k[pos_i:pos_i + 1])[0]
                    if not mandatory and acc_cur > -0.5:
                        continue
                    best_lane, best_gain = -1, 0.8
                    for kk in (k - 1, k + 1):
                        if not 0 <= kk < lane_count:
                            continue
                        if any(ev.blocks(t, kk) and 0 < ev.position_ft - x[i] < 900.0
                               and isinstance(ev, LaneBlockage) for ev in events):
                            continue
                        tids = sorted_ids[kk]
                        j = int(np.searchsorted(x[tids], x[i])) if len(tids) else 0
                        # safety: gaps to new leader and follower
                        lead_gap = (x[tids[j]] - x[i] - p.vehicle_length
                                    if j < len(tids) else 1e6)
                        fol_gap = (x[i] - x[tids[j - 1]] - p.vehicle_length
                                   if j > 0 else 1e6)
                        if lead_gap < p.min_gap or fol_gap < p.min_gap:
                            continue
                        if j > 0:
                            f = tids[j - 1]
                            fol_acc = idm_accel(v[f:f + 1], vdes[f:f + 1],
                                                np.array([fol_gap]),
                                                np.array([v[f] - v[i]]))[0]
                            if fol_acc < -p.comfort_decel * 1.5:
                                continue
                        lead_dv = v[i] - (v[tids[j]] if j < len(tids) else v[i])
                        acc_new = idm_accel(v[i:i + 1], vdes[i:i + 1],
                                            np.array([lead_gap]),
                                            np.array([lead_dv]))[0]
                        gain = acc_new - acc_cur
                        if mandatory:
                            gain += 2.0  # bias toward leaving a closed lane
                        if gain > best_gain:
                            best_gain, best_lane = gain, kk
                    if best_lane >= 0:
                        lane[i] = best_lane
                        sorted_ids[k] = lane_sorted(k)
                        sorted_ids[best_lane] = lane_sorted(best_lane)
                        if len(sorted_ids[k]):
                            gaps[k] = leader_terms(sorted_ids[k], t)
                        gaps[best_lane] = leader_terms(sorted_ids[best_lane], t)
                        break  # re-evaluate this lane next cycle

        # Longitudinal update.
        for k in range(lane_count):
            ids = lane_sorted(k)
            if not len(ids):
                continue
            gap, dv = leader_terms(ids, t)
            acc = idm_accel(v[ids], vdes[ids], gap, dv)
            vn = np.maximum(0.0, v[ids] + acc * frame_dt)
            x[ids] += 0.5 * (v[ids] + vn) * frame_dt
            v[ids] = vn

        # Exits.
        live = np.nonzero(alive[:n_vehicles])[0]
        gone = live[x[live] > road_length_ft + 200.0]
        if len(gone):
            alive[gone] = False
            exited += len(gone)

        # Per-second bookkeeping.
        if step % int(round(1.0 / frame_dt)) == 0:
            sec = int(round(t))
            entered_cum[sec] = entered
            exited_cum[sec] = exited
            present[sec] = int(alive[:n_vehicles].sum())
            live = np.nonzero(alive[:n_vehicles])[0]
            stopped_x = x[live][(v[live] < stop_speed)]
            for ev in events:
                if not ev.active(t) and not _recent(ev, t):
                    continue
                q = stopped_x[(stopped_x < ev.position_ft + 100.0)
                              & (stopped_x > ev.position_ft - 6000.0)]
                if len(q) >= 3:
                    if isinstance(ev, LaneBlockage):
                        incident_queue[sec] = True
                        tail = float(q.min())
                        tail_mile[sec] = feet_to_miles(min(tail, ev.position_ft))
                    else:
                        signal_queue[sec] = True
                        if np.isnan(tail_mile[sec]):
                            tail_mile[sec] = feet_to_miles(min(float(q.min()),
                                                               ev.position_ft))

    intervals = _build_intervals(duration, events, signal_queue, incident_queue)

    vehicles = {}
    for i in range(n_vehicles):
        if len(rec_t[i]) >= 2:
            vehicles[i] = (np.asarray(rec_t[i]), np.asarray(rec_x[i]),
                           np.asarray(rec_lane[i], dtype=np.int64))

    return GroundTruthLog(
        duration=duration, frame_dt=frame_dt, lane_count=lane_count,
        road_length_ft=road_length_ft, params=p, vehicles=vehicles,
        intervals=intervals, tail_mile=tail_mile,
        entered_cum=entered_cum, exited_cum=exited_cum, present=present,
        events=list(events),
    )


def _recent(ev, t: float, grace: float = 600.0) -> bool:
    """Queues persist past an event's end; keep tracking them for a while."""
    return ev.end_s <= t < ev.end_s + grace


def _build_intervals(duration: float, events: list,
                     signal_queue: np.ndarray,
                     incident_queue: np.ndarray) -> list[tuple[float, float, int]]:
    """Per-second labels with dominance incident > recurrent > normal."""
    n = int(math.ceil(duration))
    labels = np.zeros(n, dtype=np.int64)
    for sec in range(n):
        t = float(sec)
        incident_active = any(isinstance(ev, LaneBlockage) and ev.active(t)
                              for ev in events)
        if incident_active or incident_queue[sec]:
            labels[sec] = 2
        elif signal_queue[sec]:
            labels[sec] = 1
    intervals: list[tuple[float, float, int]] = []
    start = 0
    for sec in range(1, n + 1):
        if sec == n or labels[sec] != labels[start]:
            intervals.append((float(start), float(min(sec, duration)),
                              int(labels[start])))
            start = sec
    return intervals
