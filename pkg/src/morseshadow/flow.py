"""Negative gradient flow: integration, the time-one map, trajectories.

The integrator is fixed-step RK4 with reprojection onto the manifold
after every step; reproducibility of every downstream number is the
point, so there is no adaptive stepping. Negative time integrates the
positive gradient field (the flow is reversible).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InstabilityError, NoConvergenceError, PairNotFoundError
from .geometry import SPHERE, ModelManifold
from .morse import CriticalPoint, MorseSystem, find_critical_points

_MAX_HALVINGS = 8
_DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class FlowParams:
    step: float = 1e-3
    integrator: str = "rk4"
    endpoint_tol: float = 1e-6
    max_time: float = 50.0
    record_dt: float = 0.01

    def __post_init__(self):
        if self.step <= 0 or self.endpoint_tol <= 0:
            raise ValueError("step and endpoint_tol must be positive")
        if self.integrator != "rk4":
            raise ValueError("only the fixed-step rk4 integrator is supported")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A sampled flow line with asymptotic endpoints.

    Time is normalized so that F(gamma(0)) sits at the midpoint of
    [F(terminus), F(origin)]; F is strictly decreasing along samples.
    """

    times: np.ndarray
    points: np.ndarray
    origin: CriticalPoint
    terminus: CriticalPoint

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True, eq=False)
class TrajectoryPair:
    p: CriticalPoint
    q: CriticalPoint
    gamma1: Trajectory
    gamma2: Trajectory
    separation: float


def _field(sys: MorseSystem, sign: float):
    def fn(pts):
        return -sign * sys.gradient(pts)

    return fn


def _rk4_span(sys, x, total, sign, step, record_dt=None, stop_near=None, tol=0.0):
    """Integrate for `total` time units; optionally record samples every
    record_dt and stop once within tol of a point in stop_near.

    Returns (times, points, stopped). Drift off the manifold beyond
    _DRIFT_TOL before reprojection raises InstabilityError (handled by
    the caller via step halving).
    """
    m = sys.manifold
    f = _field(sys, sign)
    x = np.asarray(x, dtype=float).copy()
    nsteps = max(1, int(round(total / step))) if total > 0 else 0
    h = total / nsteps if nsteps else 0.0
    rec_every = max(1, int(round(record_dt / step))) if record_dt else None

    times = [0.0]
    pts = [x.copy()]
    stopped = False
    for i in range(nsteps):
        # substeps use the ambient extension of the field; the step result
        # is reprojected, which keeps the O(h^4) order on the manifold
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        raw = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if m.kind == SPHERE:
            drift = np.max(np.abs(np.sqrt(np.einsum("...k,...k->...", raw, raw)) - 1.0))
            if drift > _DRIFT_TOL:
                raise InstabilityError(f"off-manifold drift {drift:.3e}")
        x = m.project(raw)
        if rec_every and ((i + 1) % rec_every == 0 or i == nsteps - 1):
            times.append((i + 1) * h)
            pts.append(x.copy())
            if stop_near is not None:
                d = m.dist_many(x, stop_near)
                if np.min(d) < tol:
                    stopped = True
                    break
    if rec_every:
        return np.array(times), np.array(pts), stopped
    return None, x, stopped


def integrate(sys: MorseSystem, x, t: float, params: FlowParams):
    """Flow x for time t along the negative gradient field (t < 0 flows
    the positive field); vectorized over stacked points."""
    sys.manifold.check_point(x)
    if t == 0.0:
        return np.asarray(x, dtype=float).copy()
    sign = 1.0 if t > 0 else -1.0
    step = params.step
    for _ in range(_MAX_HALVINGS + 1):
        try:
            _, out, _ = _rk4_span(sys, x, abs(t), sign, step)
            return out
        except InstabilityError:
            step *= 0.5
    raise InstabilityError(
        f"integration unstable even at step {step:.3e}"
    )


def iterate(sys: MorseSystem, x, n: int, params: FlowParams):
    """f^n(x) where f is the time-one map of the negative gradient flow;
    n may be negative; composition of |n| unit-time integrations."""
    if n == 0:
        return np.asarray(x, dtype=float).copy()
    out = np.asarray(x, dtype=float)
    sign = 1.0 if n > 0 else -1.0
    for _ in range(abs(n)):
        out = integrate(sys, out, sign * 1.0, params)
    return out


def _flow_until_near(sys, x, targets, params, sign):
    remaining = params.max_time
    times_all = [np.array([0.0])]
    pts_all = [np.asarray(x, dtype=float)[None, :]]
    cur = np.asarray(x, dtype=float)
    offset = 0.0
    chunk = min(5.0, params.max_time)
    while remaining > 1e-12:
        span = min(chunk, remaining)
        t, p, stopped = _rk4_span(
            sys, cur, span, sign, params.step,
            record_dt=params.record_dt, stop_near=targets, tol=params.endpoint_tol,
        )
        times_all.append(t[1:] + offset)
        pts_all.append(p[1:])
        cur = p[-1]
        offset += t[-1]
        remaining -= t[-1]
        if stopped:
            return np.concatenate(times_all), np.concatenate(pts_all)
    raise NoConvergenceError(
        f"flow did not reach a critical neighborhood within {params.max_time}"
    )


def trajectory_through(sys: MorseSystem, x, params: FlowParams,
                       critical_points=None) -> Trajectory:
    """The full flow line through x, integrated both ways until within
    endpoint_tol of critical points, with endpoints classified by the
    nearest critical point."""
    sys.manifold.check_point(x)
    m = sys.manifold
    crit = critical_points if critical_points is not None else find_critical_points(sys)
    locs = np.array([c.location for c in crit])
    if float(np.min(m.dist_many(np.asarray(x, float), locs))) < params.endpoint_tol:
        raise ValueError("start point lies in a critical neighborhood")

    tf, pf = _flow_until_near(sys, x, locs, params, sign=1.0)
    tb, pb = _flow_until_near(sys, x, locs, params, sign=-1.0)

    terminus = crit[int(np.argmin(m.dist_many(pf[-1], locs)))]
    origin = crit[int(np.argmin(m.dist_many(pb[-1], locs)))]

    times = np.concatenate([-tb[::-1][:-1], tf])
    pts = np.concatenate([pb[::-1][:-1], pf])

    # shift time zero to the mid-level crossing of F
    mid = 0.5 * (origin.value + terminus.value)
    fv = sys.value(pts)
    k = int(np.argmin(np.abs(fv - mid)))
    times = times - times[k]
    return Trajectory(times=times, points=pts, origin=origin, terminus=terminus)


def point_at_level(sys: MorseSystem, traj: Trajectory, level):
    """Interpolated point(s) on a trajectory at given F-level(s).

    F is strictly monotone decreasing along the trajectory, so each
    level in the open value range has a unique crossing.
    """
    fv = sys.value(traj.points)
    level = np.atleast_1d(np.asarray(level, dtype=float))
    # fv decreasing: search on the reversed (increasing) array
    rev = fv[::-1]
    j = np.searchsorted(rev, level, side="left")
    j = np.clip(j, 1, len(rev) - 1)
    i_hi = len(fv) - 1 - j          # sample with F >= level
    i_lo = i_hi + 1                 # sample with F < level
    m = sys.manifold
    a, b = traj.points[i_hi], traj.points[i_lo]
    # bisect the interpolation weight until F hits the level to machine
    # precision (F is monotone along the short bracketing segment)
    wlo = np.zeros(len(level))
    whi = np.ones(len(level))
    for _ in range(52):
        w = 0.5 * (wlo + whi)
        above = sys.value(m.interpolate(a, b, w)) >= level
        wlo = np.where(above, w, wlo)
        whi = np.where(above, whi, w)
    return m.interpolate(a, b, 0.5 * (wlo + whi))


def separation(sys: MorseSystem, t1: Trajectory, t2: Trajectory, n_levels=128):
    """Max over matched F-levels of the distance between two trajectories
    sharing both endpoints."""
    lo = max(sys.value(t1.points).min(), sys.value(t2.points).min())
    hi = min(sys.value(t1.points).max(), sys.value(t2.points).max())
    margin = 1e-6 * (hi - lo)
    levels = np.linspace(lo + margin, hi - margin, n_levels)
    a = point_at_level(sys, t1, levels)
    b = point_at_level(sys, t2, levels)
    return float(np.max(sys.manifold.dist_many(a, b)))


def _shoot_batch(sys, seeds, crit, params, sign):
    """Flow a batch of seeds together until every one is within
    endpoint_tol of a critical point; returns per-seed (times, points)."""
    m = sys.manifold
    locs = np.array([c.location for c in crit])
    cur = np.asarray(seeds, dtype=float)
    n = len(cur)
    times = [0.0]
    snaps = [cur.copy()]
    hit_at = np.full(n, -1)
    elapsed = 0.0
    while elapsed < params.max_time - 1e-12:
        span = min(5.0, params.max_time - elapsed)
        t, p, _ = _rk4_span(sys, cur, span, sign, params.step,
                            record_dt=params.record_dt)
        for ti, pi in zip(t[1:], p[1:]):
            times.append(elapsed + ti)
            snaps.append(pi.copy())
            d = np.min(m.pairwise_dist(pi, locs), axis=1)
            newly = (hit_at < 0) & (d < params.endpoint_tol)
            hit_at[newly] = len(times) - 1
            if np.all(hit_at >= 0):
                break
        if np.all(hit_at >= 0):
            break
        cur = p[-1]
        elapsed += t[-1]
    if np.any(hit_at < 0):
        raise NoConvergenceError(
            f"{int(np.sum(hit_at < 0))} shot trajectories did not converge "
            f"within {params.max_time}"
        )
    times = np.array(times)
    snaps = np.array(snaps)  # (nt, n, d)
    out = []
    for k in range(n):
        stop = hit_at[k] + 1
        out.append((times[:stop].copy(), snaps[:stop, k, :].copy()))
    return out


def find_trajectory_pair(sys: MorseSystem, params: FlowParams,
                         n_directions: int = 16,
                         critical_points=None) -> TrajectoryPair:
    """Two distinct flow lines from the top critical point p to a common
    minimum q, chosen to maximize separation.

    Shoots from a ring of radius 100 * endpoint_tol in the unstable
    (tangent) disc at p; the whole ring is integrated as one batch.
    """
    crit = critical_points if critical_points is not None else find_critical_points(sys)
    m = sys.manifold
    p = max(crit, key=lambda c: (c.index, c.value))
    locs = np.array([c.location for c in crit])
    basis = m.tangent_basis(p.location)
    r0 = params.endpoint_tol * 100.0

    for attempt in range(3):
        ndir = n_directions * (2 ** attempt)
        angles = 2.0 * np.pi * np.arange(ndir) / ndir
        dirs = np.outer(np.cos(angles), basis[0]) + np.outer(np.sin(angles), basis[1])
        seeds = m.point_at_chord(p.location, dirs, np.full(ndir, r0))
        try:
            fwd = _shoot_batch(sys, seeds, crit, params, sign=1.0)
            bwd = _shoot_batch(sys, seeds, crit, params, sign=-1.0)
        except NoConvergenceError:
            continue
        trajs = []
        for (tf, pf), (tb, pb) in zip(fwd, bwd):
            origin = crit[int(np.argmin(m.dist_many(pb[-1], locs)))]
            terminus = crit[int(np.argmin(m.dist_many(pf[-1], locs)))]
            if m.dist_many(origin.location, p.location) > 1e-9:
                continue
            tt = np.concatenate([-tb[::-1][:-1], tf])
            pts = np.concatenate([pb[::-1][:-1], pf])
            mid = 0.5 * (origin.value + terminus.value)
            fv = sys.value(pts)
            kmid = int(np.argmin(np.abs(fv - mid)))
            trajs.append(Trajectory(times=tt - tt[kmid], points=pts,
                                    origin=origin, terminus=terminus))
        # group by terminus, keep the best-separated same-terminus pair
        best = None
        for i in range(len(trajs)):
            for j in range(i + 1, len(trajs)):
                ti, tj = trajs[i], trajs[j]
                if m.dist_many(ti.terminus.location, tj.terminus.location) > 1e-9:
                    continue
                sep = separation(sys, ti, tj)
                if sep > 0 and (best is None or sep > best[0]):
                    best = (sep, ti, tj)
        if best is not None:
            sep, g1, g2 = best
            return TrajectoryPair(p=p, q=g1.terminus, gamma1=g1, gamma2=g2,
                                  separation=sep)
    raise PairNotFoundError(
        f"no two connecting trajectories found with up to {ndir} ring samples"
    )
