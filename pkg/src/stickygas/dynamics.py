"""Event-driven construction of the sticky-particle shock timeline.

Between collisions every cluster follows its barycentric quadratic, so the
next collision is the earliest crossing time among adjacent cluster paths.
Collisions that land within the time-scaled grouping tolerance of the
earliest one are treated as a single simultaneous event; the clusters they
connect merge in one step (multi-cluster pile-ups included).  After a merge
the new path is re-derived from the initial data via the barycentric
formula -- never by local continuation -- so floating-point drift cannot
desynchronize paths from aggregates.

`brute_force_partitions` provides an independent oracle: explicit time
stepping that merges whenever adjacent barycenters touch or cross at a step
boundary.  It shares only the barycentric evaluation with the event engine,
not the root-finding or scheduling.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import IdenticalPaths, TimeOutOfRange
from .model import (
    Cluster,
    InitialData,
    Partition,
    interval_path,
    make_cluster,
    partition_from_intervals,
    validate,
)
from .quadratics import QuadraticPath, quadratic_meet_times
from .tolerances import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class MergeGroup:
    members: tuple[tuple[int, int], ...]  # cluster index ranges before the merge
    merged: Cluster


@dataclass(frozen=True)
class ShockEvent:
    time: float
    groups: tuple[MergeGroup, ...]


@dataclass(frozen=True)
class Segment:
    """Inter-shock window [t_lo, t_hi) (last segment closed at t_end)."""

    t_lo: float
    t_hi: float
    partition: Partition
    paths: tuple[QuadraticPath, ...]


@dataclass(frozen=True)
class PendingEvent:
    time: float
    groups: tuple[tuple[int, ...], ...]  # cluster indices per merge group


def next_collision(
    partition: Partition,
    paths: Sequence[QuadraticPath],
    t_now: float,
    tol: Tolerances = DEFAULT_TOL,
) -> PendingEvent | None:
    """Earliest future crossing among adjacent cluster paths, grouped.

    Returns None when no adjacent pair ever meets again.  Pairs whose
    crossing falls within tol.event_tol of the earliest time are grouped
    into connected runs, giving the simultaneous multi-cluster merges.
    """
    k_pairs = len(paths) - 1
    if k_pairs < 1:
        return None
    candidates: list[tuple[float, int]] = []
    for k in range(k_pairs):
        try:
            roots = quadratic_meet_times(paths[k], paths[k + 1], after=t_now, tol=tol)
        except IdenticalPaths:
            # coincident paths: already in contact, merge immediately
            candidates.append((t_now, k))
            continue
        if roots:
            candidates.append((roots[0].time, k))
    if not candidates:
        return None
    t_star = min(t for t, _ in candidates)
    eps = tol.event_tol(t_star)
    chosen = sorted(k for t, k in candidates if t <= t_star + eps)
    groups: list[tuple[int, ...]] = []
    run = [chosen[0], chosen[0] + 1]
    for k in chosen[1:]:
        if k == run[-1]:
            run.append(k + 1)
        else:
            groups.append(tuple(run))
            run = [k, k + 1]
    groups.append(tuple(run))
    return PendingEvent(t_star, tuple(groups))


def _apply_event(
    data: InitialData,
    partition: Partition,
    paths: Sequence[QuadraticPath],
    pending: PendingEvent,
) -> tuple[Partition, tuple[QuadraticPath, ...], ShockEvent]:
    group_start = {grp[0]: grp for grp in pending.groups}
    in_group = {k for grp in pending.groups for k in grp}
    clusters: list[Cluster] = []
    new_paths: list[QuadraticPath] = []
    records: list[MergeGroup] = []
    k = 0
    old = partition.clusters
    while k < len(old):
        if k in group_start:
            grp = group_start[k]
            g = old[grp[0]].left_index
            d = old[grp[-1]].right_index
            merged = make_cluster(data, g, d, pending.time)
            clusters.append(merged)
            new_paths.append(interval_path(data, g, d))
            records.append(MergeGroup(tuple(old[i].interval for i in grp), merged))
            k = grp[-1] + 1
        elif k in in_group:  # pragma: no cover - groups start at their first member
            k += 1
        else:
            clusters.append(old[k])
            new_paths.append(paths[k])
            k += 1
    return Partition(tuple(clusters)), tuple(new_paths), ShockEvent(pending.time, tuple(records))


@dataclass(frozen=True, eq=False)
class ShockTimeline:
    initial: InitialData
    t_end: float
    events: tuple[ShockEvent, ...]
    segments: tuple[Segment, ...]

    @cached_property
    def event_times(self) -> tuple[float, ...]:
        return tuple(e.time for e in self.events)

    @cached_property
    def _starts(self) -> list[float]:
        return [seg.t_lo for seg in self.segments]

    @property
    def total_mass(self) -> float:
        return self.initial.total_mass

    def _check_time(self, t: float) -> None:
        if not 0.0 <= t <= self.t_end:
            raise TimeOutOfRange(f"t={t} outside [0, {self.t_end}]")

    def segment_at(self, t: float) -> Segment:
        """Segment containing t under the right-continuous convention."""
        self._check_time(t)
        idx = max(bisect_right(self._starts, t) - 1, 0)
        return self.segments[idx]

    def segment_before(self, t: float) -> Segment:
        """Segment giving the left limit at t (the segment itself at non-events)."""
        self._check_time(t)
        idx = max(bisect_left(self._starts, t) - 1, 0)
        return self.segments[idx]

    def partition_at(self, t: float) -> Partition:
        return self.segment_at(t).partition

    def partition_before(self, t: float) -> Partition:
        return self.segment_before(t).partition

    def _per_particle(self, seg: Segment, t: float, kind: str) -> np.ndarray:
        out = np.empty(self.initial.n)
        for cluster, path in zip(seg.partition.clusters, seg.paths):
            g, d = cluster.interval
            if kind == "x":
                out[g : d + 1] = path(t)
            elif kind == "v":
                out[g : d + 1] = path.derivative(t)
            else:
                out[g : d + 1] = cluster.acceleration
        return out

    def positions_at(self, t: float) -> np.ndarray:
        return self._per_particle(self.segment_at(t), t, "x")

    def velocities_at(self, t: float) -> np.ndarray:
        return self._per_particle(self.segment_at(t), t, "v")

    def accelerations_at(self, t: float) -> np.ndarray:
        return self._per_particle(self.segment_at(t), t, "a")

    def positions_at_left(self, t: float) -> np.ndarray:
        return self._per_particle(self.segment_before(t), t, "x")

    def velocities_at_left(self, t: float) -> np.ndarray:
        return self._per_particle(self.segment_before(t), t, "v")

    def accelerations_at_left(self, t: float) -> np.ndarray:
        return self._per_particle(self.segment_before(t), t, "a")

    def sample_positions(self, ts: Sequence[float]) -> np.ndarray:
        return self._sample(ts, "x")

    def sample_velocities(self, ts: Sequence[float]) -> np.ndarray:
        return self._sample(ts, "v")

    def _sample(self, ts: Sequence[float], kind: str) -> np.ndarray:
        """Vectorized per-particle samples, shape (len(ts), N)."""
        tarr = np.asarray(ts, dtype=float)
        if tarr.size and (tarr.min() < 0.0 or tarr.max() > self.t_end):
            raise TimeOutOfRange("sample times outside [0, t_end]")
        out = np.empty((tarr.size, self.initial.n))
        for i, seg in enumerate(self.segments):
            last = i == len(self.segments) - 1
            mask = (tarr >= seg.t_lo) & ((tarr <= seg.t_hi) if last else (tarr < seg.t_hi))
            if not mask.any():
                continue
            tm = tarr[mask]
            for cluster, path in zip(seg.partition.clusters, seg.paths):
                g, d = cluster.interval
                if kind == "x":
                    vals = path.c0 + tm * (path.c1 + 0.5 * tm * path.c2)
                else:
                    vals = path.c1 + tm * path.c2
                out[mask, g : d + 1] = vals[:, None]
        return out

    def time_to_next_event(self, t: float) -> float:
        """Gap from t to the next shock (inf when none remains)."""
        self._check_time(t)
        idx = bisect_right(self.event_times, t)
        if idx == len(self.event_times):
            return math.inf
        return self.event_times[idx] - t


def simulate(
    data: InitialData,
    t_end: float = math.inf,
    tol: Tolerances = DEFAULT_TOL,
) -> ShockTimeline:
    """Run the sticky dynamics up to t_end (or until no collision remains).

    The returned timeline's segments tile [0, t_end]; the cluster count
    strictly decreases across the at most N-1 events.
    """
    data = validate(data)
    if not t_end > 0.0:
        raise TimeOutOfRange("t_end must be positive")
    partition = Partition(tuple(make_cluster(data, j, j, 0.0) for j in range(data.n)))
    paths: tuple[QuadraticPath, ...] = tuple(interval_path(data, j, j) for j in range(data.n))
    segments: list[Segment] = []
    events: list[ShockEvent] = []
    t_now = 0.0
    while True:
        pending = next_collision(partition, paths, t_now, tol)
        if pending is None or pending.time > t_end:
            segments.append(Segment(t_now, t_end, partition, paths))
            break
        t_star = max(pending.time, t_now)
        segments.append(Segment(t_now, t_star, partition, paths))
        partition, paths, event = _apply_event(data, partition, paths, pending)
        events.append(event)
        t_now = t_star
    return ShockTimeline(data, float(t_end), tuple(events), tuple(segments))


# ---------------------------------------------------------------------------
# Time-stepped oracle


def brute_force_partitions(
    data: InitialData,
    times: Sequence[float],
    dt: float,
    tol: Tolerances = DEFAULT_TOL,
    chunk: int = 4096,
) -> list[Partition]:
    """Partitions at the requested times from explicit time stepping.

    Advances all clusters on a grid of step dt; at each step boundary merges
    every adjacent run whose barycenters are out of order or within
    tol.abs_tol, cascading until the boundary is clean.  The requested times
    are inserted as extra boundaries; detection therefore lags a true shock
    by at most dt, so callers should sample away from shocks.
    """
    if dt <= 0.0:
        raise TimeOutOfRange("dt must be positive")
    data = validate(data)
    order = np.argsort(times, kind="stable")
    sorted_times = [float(times[i]) for i in order]
    if sorted_times and sorted_times[0] < 0.0:
        raise TimeOutOfRange("sample times must be nonnegative")
    t_max = sorted_times[-1] if sorted_times else 0.0
    grid = np.arange(dt, t_max + dt, dt)
    grid = grid[grid <= t_max]
    bounds = np.unique(np.concatenate([grid, np.asarray(sorted_times)]))
    requested = {t: None for t in sorted_times}

    intervals: list[tuple[int, int]] = [(j, j) for j in range(data.n)]
    coeffs = _interval_coeffs(data, intervals)

    def record_upto(upto: float) -> None:
        for t in requested:
            if requested[t] is None and t <= upto:
                requested[t] = list(intervals)

    if 0.0 in requested:
        requested[0.0] = list(intervals)

    bi = 0
    n_bounds = len(bounds)
    while bi < n_bounds and len(intervals) > 1:
        hi = min(bi + chunk, n_bounds)
        tchunk = bounds[bi:hi]
        pos = _eval_positions(coeffs, tchunk)  # (K, len(chunk))
        bad_cols = np.nonzero((np.diff(pos, axis=0) <= tol.abs_tol).any(axis=0))[0]
        if bad_cols.size == 0:
            record_upto(tchunk[-1])
            bi = hi
            continue
        j = int(bad_cols[0])
        if j > 0:
            record_upto(tchunk[j - 1])
        s = float(tchunk[j])
        intervals = _merge_at(data, intervals, s, tol)
        coeffs = _interval_coeffs(data, intervals)
        record_upto(s)
        bi += j + 1
    record_upto(math.inf)

    by_time = {t: partition_from_intervals(data, iv, t) for t, iv in requested.items()}
    return [by_time[float(times[i])] for i in range(len(times))]


def brute_force_partition(
    data: InitialData,
    t: float,
    dt: float,
    tol: Tolerances = DEFAULT_TOL,
) -> Partition:
    return brute_force_partitions(data, [t], dt, tol)[0]


def _interval_coeffs(data: InitialData, intervals: list[tuple[int, int]]) -> np.ndarray:
    rows = []
    for g, d in intervals:
        p = interval_path(data, g, d)
        rows.append((p.c0, p.c1, p.c2))
    return np.asarray(rows)


def _eval_positions(coeffs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    c0 = coeffs[:, 0:1]
    c1 = coeffs[:, 1:2]
    c2 = coeffs[:, 2:3]
    t = ts[None, :]
    return c0 + t * (c1 + 0.5 * t * c2)


def _merge_at(
    data: InitialData,
    intervals: list[tuple[int, int]],
    s: float,
    tol: Tolerances,
) -> list[tuple[int, int]]:
    """Cascade-merge adjacent intervals overlapping at time s."""
    current = list(intervals)
    while len(current) > 1:
        pos = _eval_positions(_interval_coeffs(data, current), np.asarray([s]))[:, 0]
        gaps = np.diff(pos)
        bad = np.nonzero(gaps <= tol.abs_tol)[0]
        if bad.size == 0:
            break
        merged: list[tuple[int, int]] = []
        k = 0
        bad_set = set(int(b) for b in bad)
        while k < len(current):
            g, d = current[k]
            while k in bad_set:
                k += 1
                d = current[k][1]
            merged.append((g, d))
            k += 1
        current = merged
    return current
