"""Composite verification suites shared by the fuzzer and the test suite.

Each suite inspects one completed timeline and returns a SuiteResult with a
human-readable detail string on failure.  Conservation sums run over the
per-particle views (mass per initial particle never changes, so the total
is the unchanged flat sum; force and momentum carry the rounding of the
cluster averages and are held to 1e-12 relative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    Segment,
    ShockTimeline,
    brute_force_partitions,
    simulate,
)
from .flow import dermoune_identity_residuals
from .gvp import gvp_equivalence_check
from .model import InitialData
from .quadratics import QuadraticPath
from .tolerances import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str = ""


def horizon_of(timeline: ShockTimeline) -> float:
    """A finite window that covers all events with a margin."""
    if math.isfinite(timeline.t_end):
        return timeline.t_end
    if timeline.events:
        return timeline.event_times[-1] + 1.0
    return 1.0


def sample_times(
    timeline: ShockTimeline,
    rng: np.random.Generator,
    count: int,
    min_gap: float = 1e-6,
    lo: float | None = None,
    hi: float | None = None,
) -> list[float]:
    """Uniform sample times keeping at least min_gap away from every shock."""
    lo = min_gap if lo is None else lo
    hi = horizon_of(timeline) if hi is None else hi
    out: list[float] = []
    events = timeline.event_times
    while len(out) < count:
        t = float(rng.uniform(lo, hi))
        if all(abs(t - s) >= min_gap for s in events):
            out.append(t)
    return out


def conservation_suite(
    timeline: ShockTimeline,
    n_grid: int = 1000,
    rel: float = 1e-12,
    tol: Tolerances = DEFAULT_TOL,
) -> SuiteResult:
    """Exact per-cluster mass bookkeeping, force/momentum conservation at
    1e-12 relative, and non-crossing on a dense grid plus event edges."""
    data = timeline.initial
    m = data.masses
    force0 = float(m @ data.accelerations)
    mom0 = float(m @ data.velocities)

    for seg in timeline.segments:
        for c in seg.partition.clusters:
            recomputed = 0.0
            for j in range(c.left_index, c.right_index + 1):
                recomputed += m[j]
            if recomputed != c.mass:
                return SuiteResult("conservation", False,
                                   f"cluster {c.interval} mass drifted from its member sum")
        seg_total = 0.0
        for c in seg.partition.clusters:
            seg_total += c.mass
        if abs(seg_total - data.total_mass) > 1e-14 * data.total_mass:
            return SuiteResult("conservation", False,
                               f"segment total mass off by {seg_total - data.total_mass}")

    hi = horizon_of(timeline)
    ts = list(np.linspace(0.0, hi, n_grid))
    for s in timeline.event_times:
        for t in (s - 1e-9, s, s + 1e-9):
            if 0.0 <= t <= hi:
                ts.append(t)
    ts = sorted(ts)

    xs = timeline.sample_positions(ts)
    x_scale = 1.0 + float(np.abs(xs).max())
    if np.any(np.diff(xs, axis=1) < -rel * x_scale):
        worst = float(np.diff(xs, axis=1).min())
        return SuiteResult("conservation", False, f"position ordering violated by {worst}")

    vs = timeline.sample_velocities(ts)
    tarr = np.asarray(ts)
    momentum = vs @ m
    model = mom0 + tarr * force0
    mom_scale = 1.0 + np.abs(mom0) + np.abs(tarr) * abs(force0)
    if np.any(np.abs(momentum - model) > rel * mom_scale):
        worst = float(np.abs(momentum - model).max())
        return SuiteResult("conservation", False, f"momentum deviates from affine law by {worst}")

    force_scale = 1.0 + abs(force0)
    for seg in timeline.segments:
        seg_force = 0.0
        for c in seg.partition.clusters:
            seg_force += c.mass * c.acceleration
        if abs(seg_force - force0) > rel * force_scale:
            return SuiteResult("conservation", False,
                               f"total force drifted by {seg_force - force0}")

    return SuiteResult("conservation", True)


def gvp_suite(
    timeline: ShockTimeline,
    rng: np.random.Generator,
    n_times: int = 5,
    min_gap: float = 1e-6,
    tol: Tolerances = DEFAULT_TOL,
) -> SuiteResult:
    """Variational partition equals the simulated one at sampled times."""
    times = sample_times(timeline, rng, n_times, min_gap)
    report = gvp_equivalence_check(timeline.initial, times, tol, timeline)
    if report.all_match:
        return SuiteResult("gvp-equivalence", True)
    e = report.mismatches[0]
    return SuiteResult("gvp-equivalence", False,
                       f"t={e.time}: simulated {e.simulated} vs reconstructed "
                       f"{e.reconstructed} ({e.error or 'mismatch'})")


def dermoune_suite(
    timeline: ShockTimeline,
    rng: np.random.Generator,
    n_times: int = 20,
    factor: float = 1e-12,
) -> SuiteResult:
    """Conditional-expectation identities hold to 1e-12 * (1 + scale)."""
    hi = horizon_of(timeline)
    times = [0.0] + [float(t) for t in rng.uniform(0.0, hi, n_times - 1)]
    for t in times:
        res = dermoune_identity_residuals(timeline, t)
        checks = [
            (res.r_pos, res.scale_pos, "position"),
            (res.r_vel, res.scale_vel, "velocity"),
            (res.r_acc, res.scale_acc, "acceleration"),
        ]
        for value, scale, label in checks:
            if value > factor * (1.0 + scale):
                return SuiteResult("dermoune-identities", False,
                                   f"{label} residual {value} at t={t}")
    return SuiteResult("dermoune-identities", True)


def oracle_suite(
    timeline: ShockTimeline,
    rng: np.random.Generator,
    dt: float = 1e-5,
    n_times: int = 5,
    tol: Tolerances = DEFAULT_TOL,
) -> SuiteResult:
    """Event-driven partition equals the time-stepped oracle's at sampled
    times kept more than 10*dt away from every shock."""
    times = sample_times(timeline, rng, n_times, min_gap=10.0 * dt)
    oracle = brute_force_partitions(timeline.initial, times, dt, tol)
    for t, part in zip(times, oracle):
        if timeline.partition_at(t).intervals != part.intervals:
            return SuiteResult("oracle-equivalence", False,
                               f"t={t}: engine {timeline.partition_at(t).intervals} "
                               f"vs oracle {part.intervals}")
    return SuiteResult("oracle-equivalence", True)


def run_instance_suites(
    data: InitialData,
    rng: np.random.Generator,
    with_oracle: bool = False,
    tol: Tolerances = DEFAULT_TOL,
) -> list[SuiteResult]:
    timeline = simulate(data, tol=tol)
    results = [
        conservation_suite(timeline, tol=tol),
        gvp_suite(timeline, rng, tol=tol),
        dermoune_suite(timeline, rng),
    ]
    if with_oracle:
        results.append(oracle_suite(timeline, rng, tol=tol))
    return results


def inject_velocity_fault(timeline: ShockTimeline, delta: float = 1e-3) -> ShockTimeline:
    """Perturb the first merged cluster's velocity in all later segments.

    Harness sanity check: the conservation suite must flag the result."""
    if not timeline.events:
        return timeline
    target = timeline.events[0].groups[0].merged.interval
    new_segments = []
    for seg in timeline.segments:
        paths = list(seg.paths)
        changed = False
        for k, c in enumerate(seg.partition.clusters):
            if c.interval == target and seg.t_lo >= timeline.events[0].time:
                p = paths[k]
                paths[k] = QuadraticPath(p.c0, p.c1 + delta, p.c2)
                changed = True
        new_segments.append(Segment(seg.t_lo, seg.t_hi, seg.partition, tuple(paths))
                            if changed else seg)
    return ShockTimeline(timeline.initial, timeline.t_end, timeline.events,
                         tuple(new_segments))
