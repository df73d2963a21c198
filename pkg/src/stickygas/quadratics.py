"""Quadratic trajectories and their crossing analysis.

A path is t -> c0 + c1*t + (c2/2)*t**2 with c2 the acceleration of the
owning cluster.  Crossing times between two paths drive the collision
scheduler, so root finding must not lose roots to cancellation: the
quadratic solver uses the stable half-b / citardauq pairing and falls back
to linear (then constant) when leading coefficients cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import IdenticalPaths, PreconditionViolated
from .tolerances import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class QuadraticPath:
    c0: float
    c1: float
    c2: float

    def __call__(self, t: float) -> float:
        return self.c0 + t * (self.c1 + 0.5 * t * self.c2)

    def derivative(self, t: float) -> float:
        return self.c1 + t * self.c2


@dataclass(frozen=True)
class MeetTime:
    time: float
    double: bool = False


def _real_roots(a: float, b: float, c: float, tol: Tolerances) -> list[MeetTime]:
    """All real roots of a*t^2 + b*t + c, tangency reported once.

    Assumes the caller has already dispatched the degenerate a ~ 0 case.
    """
    disc = b * b - 4.0 * a * c
    disc_scale = max(b * b, abs(4.0 * a * c))
    if disc <= 0.0:
        if disc < -8.0 * tol.rel_tol * disc_scale:
            return []
        return [MeetTime(-b / (2.0 * a), double=True)]
    if disc <= 8.0 * tol.rel_tol * disc_scale:
        return [MeetTime(-b / (2.0 * a), double=True)]
    sq = math.sqrt(disc)
    qq = -0.5 * (b + math.copysign(sq, b))
    r1 = qq / a
    r2 = c / qq
    lo, hi = (r1, r2) if r1 <= r2 else (r2, r1)
    return [MeetTime(lo), MeetTime(hi)]


def _difference_roots(p: QuadraticPath, q: QuadraticPath, tol: Tolerances) -> list[MeetTime]:
    a = 0.5 * (p.c2 - q.c2)
    b = p.c1 - q.c1
    c = p.c0 - q.c0
    if abs(p.c2 - q.c2) <= tol.abs_tol:
        # difference is (numerically) affine
        if abs(b) <= tol.abs_tol:
            if abs(c) <= tol.abs_tol:
                raise IdenticalPaths("paths coincide; treat as already merged")
            return []
        return [MeetTime(-c / b)]
    return _real_roots(a, b, c, tol)


def quadratic_meet_times(
    p: QuadraticPath,
    q: QuadraticPath,
    after: float,
    tol: Tolerances = DEFAULT_TOL,
) -> list[MeetTime]:
    """Real crossing times of p and q strictly greater than `after`, ascending.

    Raises IdenticalPaths when p and q coincide within tolerance.
    """
    return [r for r in _difference_roots(p, q, tol) if r.time > after]


def lemma_quadratic_dominance(
    q1: QuadraticPath,
    q2: QuadraticPath,
    t0: float,
    t1: float,
    tol: Tolerances = DEFAULT_TOL,
) -> bool:
    """Whether q1(s) > q2(s) for every s > t1, decided by root analysis.

    Preconditions (raised as PreconditionViolated otherwise): q1 != q2,
    q1.c2 >= q2.c2, t0 < t1, q1(t0) <= q2(t0) and q1(t1) >= q2(t1).  Under
    these the answer is provably always True; the function still decides from
    the roots so it can serve as a self-test.
    """
    if (q1.c0, q1.c1, q1.c2) == (q2.c0, q2.c1, q2.c2):
        raise PreconditionViolated("paths must differ")
    if q1.c2 < q2.c2:
        raise PreconditionViolated("leading coefficients must satisfy q1.c2 >= q2.c2")
    if not t0 < t1:
        raise PreconditionViolated("need t0 < t1")
    # boundary values at a computed crossing agree only to rounding
    band0 = tol.rel_tol * max(1.0, abs(q1(t0)), abs(q2(t0)))
    band1 = tol.rel_tol * max(1.0, abs(q1(t1)), abs(q2(t1)))
    if q1(t0) > q2(t0) + band0:
        raise PreconditionViolated("need q1(t0) <= q2(t0)")
    if q1(t1) < q2(t1) - band1:
        raise PreconditionViolated("need q1(t1) >= q2(t1)")

    a = 0.5 * (q1.c2 - q2.c2)
    b = q1.c1 - q2.c1
    c = q1.c0 - q2.c0
    if a == 0.0:
        roots = [] if b == 0.0 else [MeetTime(-c / b)]
    else:
        roots = _real_roots(a, b, c, tol)
    # roots landing within rounding of t1 itself are boundary, not violations
    boundary = t1 + tol.event_tol(t1)
    if any(r.time > boundary for r in roots):
        return False
    probe = max([t1] + [r.time for r in roots]) + 1.0
    diff = QuadraticPath(c, b, 2.0 * a)
    return diff(probe) > 0.0
