"""Discretized subcontinua, the Hausdorff metric, and the induced map.

A Continuum is a finite h-net of a true subcontinuum: points whose
adjacency graph (edges whenever dist <= 2h) is connected. Every strict
inequality about true continua is checked through these nets with a 2h
margin by the callers.

The Hausdorff distance has two paths: a brute-force double sup-inf and
a uniform-grid-bucketed one. Both compute each point-pair distance with
the same arithmetic, and the grid path only ever takes minima over
candidate sets guaranteed to contain the argmin, so the two paths agree
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyContinuumError, InvalidPointError, ResolutionError
from .geometry import SPHERE, TORUS, ModelManifold
from .flow import FlowParams, iterate
from .morse import MorseSystem


@dataclass(frozen=True, eq=False)
class Continuum:
    """h-connected point sample standing in for an element of C(M)."""

    manifold: ModelManifold
    points: np.ndarray
    h: float

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_2d(np.asarray(self.points, dtype=float)))
        if len(self.points) == 0:
            raise EmptyContinuumError("a continuum needs at least one point")
        if self.h <= 0:
            raise ValueError("resolution h must be positive")

    def __len__(self):
        return len(self.points)

    def validate(self):
        if not self.manifold.is_valid(self.points):
            raise InvalidPointError("continuum contains off-manifold points")
        if not h_connected(self.manifold, self.points, self.h):
            raise ResolutionError(f"point sample not connected at resolution {self.h}")
        return self


@dataclass(frozen=True)
class HausdorffResult:
    value: float
    witness_ab: tuple  # (point of A, nearest point of B)
    witness_ba: tuple


class _UniformGrid:
    """Uniform bucketing over ambient coordinates; exact nearest-distance
    queries by expanding Chebyshev rings of cells.

    On the torus the cells wrap mod 1 and the ring lower bound accounts
    for the quotient metric.
    """

    def __init__(self, m: ModelManifold, pts: np.ndarray, cell: float):
        self.m = m
        self.pts = pts
        self.wrap = m.kind == TORUS
        if self.wrap:
            self.ncells = max(1, int(np.floor(1.0 / cell)))
            self.cell = 1.0 / self.ncells
            keys = np.floor(pts / self.cell).astype(np.int64) % self.ncells
        else:
            self.cell = cell
            keys = np.floor(pts / cell).astype(np.int64)
        self.keys = keys
        order = np.lexsort(keys.T[::-1])
        sorted_keys = keys[order]
        uniq_mask = np.ones(len(order), dtype=bool)
        uniq_mask[1:] = np.any(sorted_keys[1:] != sorted_keys[:-1], axis=1)
        starts = np.flatnonzero(uniq_mask)
        self.cell_keys = sorted_keys[starts]                      # (C, dim)
        bounds = np.append(starts, len(order))
        self.cell_members = [order[bounds[i]:bounds[i + 1]] for i in range(len(starts))]

    def _key_of(self, x):
        k = np.floor(np.asarray(x, dtype=float) / self.cell).astype(np.int64)
        return k % self.ncells if self.wrap else k

    def _cell_lower_bounds(self, x):
        """For each occupied cell, a lower bound on the distance from x to
        any point stored in it: (chebyshev cell distance - 1) * cell."""
        kq = self._key_of(x)
        d = np.abs(self.cell_keys - kq)
        if self.wrap:
            d = np.minimum(d, self.ncells - d)
        cd = np.max(d, axis=1)
        return np.maximum(cd - 1, 0) * self.cell

    def min_dist(self, x):
        """Exact (min distance to the set, argmin index): scan occupied
        cells in order of their lower bound, stopping once no remaining
        cell can beat the current minimum."""
        lb = self._cell_lower_bounds(x)
        order = np.argsort(lb, kind="stable")
        best = np.inf
        arg = -1
        for c in order:
            if lb[c] >= best:
                break
            idx = self.cell_members[c]
            d = self.m.dist_many(x, self.pts[idx])
            j = int(np.argmin(d))
            if d[j] < best:
                best = float(d[j])
                arg = int(idx[j])
        return best, arg


def _directed_brute(m, P, Q):
    mins, args = m.min_dist_to(P, Q)
    i = int(np.argmax(mins))
    return float(mins[i]), i, int(args[i]), mins


def _directed_grid(m, P, Q, cell):
    grid = _UniformGrid(m, Q, cell)
    mins = np.empty(len(P))
    args = np.empty(len(P), dtype=np.intp)
    for k, x in enumerate(P):
        mins[k], args[k] = grid.min_dist(x)
    i = int(np.argmax(mins))
    return float(mins[i]), i, int(args[i]), mins


def hausdorff(m: ModelManifold, A: Continuum, B: Continuum,
              method: str = "brute") -> HausdorffResult:
    """Hausdorff distance between two continua with attaining witnesses."""
    if len(A) == 0 or len(B) == 0:
        raise EmptyContinuumError("hausdorff needs nonempty continua")
    P, Q = A.points, B.points
    if method == "brute":
        dab, ia, ja, _ = _directed_brute(m, P, Q)
        dba, ib, jb, _ = _directed_brute(m, Q, P)
    elif method == "grid":
        cell = max(2.0 * max(A.h, B.h), 1e-6)
        dab, ia, ja, _ = _directed_grid(m, P, Q, cell)
        dba, ib, jb, _ = _directed_grid(m, Q, P, cell)
    else:
        raise ValueError(f"unknown method {method!r}")
    if dab >= dba:
        value = dab
    else:
        value = dba
    return HausdorffResult(
        value=value,
        witness_ab=(P[ia].copy(), Q[ja].copy()),
        witness_ba=(Q[ib].copy(), P[jb].copy()),
    )


def in_neighborhood(m: ModelManifold, x, A: Continuum, eps: float) -> bool:
    """True iff the min distance from x to A's sample is < eps.

    Callers translating to statements about the true continuum must
    budget the sampling slack h themselves.
    """
    if eps <= 0 or not np.isfinite(eps):
        raise ValueError("eps must be positive and finite")
    d, _ = m.min_dist_to(np.asarray(x, dtype=float), A.points)
    return bool(np.all(d < eps)) if np.ndim(x) > 1 else bool(d[0] < eps)


def _close_pairs(m: ModelManifold, pts: np.ndarray, radius: float,
                 strict: bool = False):
    """All index pairs (i, j), i < j, whose distance is within `radius`
    (strictly, if `strict`), plus the distances, ordered by (i, j).

    Exact: candidates are windowed by a single coordinate (a lower bound
    on both model metrics), then filtered by true distance. On the torus
    a second pass catches pairs that are close across the wraparound.
    """
    n = len(pts)
    if n < 2 or radius < 0:
        return (np.empty(0, np.intp), np.empty(0, np.intp), np.empty(0))
    coord = int(np.argmax(np.ptp(pts, axis=0)))
    x = pts[:, coord]
    order = np.argsort(x, kind="stable")
    xs = x[order]
    nxt = np.arange(1, n + 1)
    his = np.searchsorted(xs, xs + radius, side="right")
    counts = np.maximum(his - nxt, 0)
    total = int(counts.sum())
    k_idx = np.repeat(np.arange(n), counts)
    grp = np.concatenate(([0], np.cumsum(counts)[:-1]))
    j_idx = nxt[k_idx] + (np.arange(total) - np.repeat(grp, counts))
    a = order[k_idx]
    b = order[j_idx]
    if m.kind == TORUS:
        lo_side = order[np.flatnonzero(xs <= radius)]
        hi_side = order[np.flatnonzero(xs >= 1.0 - radius)]
        if len(lo_side) and len(hi_side):
            aa, bb = np.meshgrid(lo_side, hi_side, indexing="ij")
            aa, bb = aa.ravel(), bb.ravel()
            keep = aa != bb
            a = np.concatenate([a, aa[keep]])
            b = np.concatenate([b, bb[keep]])
    d = m.dist_many(pts[a], pts[b])
    mask = d < radius if strict else d <= radius
    a, b, d = a[mask], b[mask], d[mask]
    ii = np.minimum(a, b)
    jj = np.maximum(a, b)
    _, first = np.unique(ii * n + jj, return_index=True)
    return ii[first], jj[first], d[first]


def _adjacency_edges(m: ModelManifold, pts: np.ndarray, radius: float):
    """Edges (i, j), i < j, of the graph with dist <= radius; exact."""
    ii, jj, dd = _close_pairs(m, pts, radius)
    return list(zip(ii.tolist(), jj.tolist(), dd.tolist()))


def h_connected(m: ModelManifold, pts: np.ndarray, h: float) -> bool:
    """Whether the graph with edges at dist <= 2h is connected."""
    pts = np.atleast_2d(pts)
    n = len(pts)
    if n == 1:
        return True
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j, _ in _adjacency_edges(m, pts, 2.0 * h):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    root = find(0)
    return all(find(i) == root for i in range(n))


def _mst_edges(m, pts, h):
    """Deterministic minimum spanning tree of the adjacency graph
    (edges at dist <= 2h), Kruskal with index tie-breaking."""
    n = len(pts)
    edges = _adjacency_edges(m, pts, 2.0 * h)
    edges.sort(key=lambda e: (e[2], e[0], e[1]))
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    out = []
    for i, j, d in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            out.append((i, j, d))
    if len(out) != n - 1:
        raise ResolutionError("adjacency graph is disconnected; cannot refine")
    return out


def refine(m: ModelManifold, A: Continuum, target_gap: float) -> Continuum:
    """Insert points along spanning-tree adjacency edges until every tree
    edge is <= target_gap; output resolution is target_gap / 2."""
    if target_gap <= 0:
        raise ValueError("target_gap must be positive")
    pts = [A.points]
    if len(A) > 1:
        for i, j, d in _mst_edges(m, A.points, A.h):
            if d <= target_gap:
                continue
            k = int(np.ceil(d / target_gap))
            w = np.arange(1, k) / k
            pts.append(m.interpolate(
                np.broadcast_to(A.points[i], (k - 1, A.points.shape[1])),
                np.broadcast_to(A.points[j], (k - 1, A.points.shape[1])),
                w,
            ))
    return Continuum(manifold=m, points=np.concatenate(pts), h=target_gap / 2.0)


def thin(m: ModelManifold, pts: np.ndarray, radius: float) -> np.ndarray:
    """Greedy subsample in index order: drop any point within `radius` of
    an already kept one. Hausdorff distance to the input is <= radius."""
    if len(pts) <= 1 or radius <= 0:
        return pts
    n = len(pts)
    # forward neighbor pairs (strictly within radius); the sweep below is
    # the greedy rule exactly: a point is dropped iff an earlier *kept*
    # point is within radius
    ii, jj, _ = _close_pairs(m, pts, radius, strict=True)
    idx = np.arange(n)
    starts = np.searchsorted(ii, idx).tolist()
    ends = np.searchsorted(ii, idx, side="right").tolist()
    fwd = jj.tolist()
    suppressed = bytearray(n)
    kept_idx = []
    for i in range(n):
        if suppressed[i]:
            continue
        kept_idx.append(i)
        for j in fwd[starts[i]:ends[i]]:
            suppressed[j] = 1
    return pts[kept_idx]


def _induced_one(sys: MorseSystem, A: Continuum, sign: int,
                 params: FlowParams, L_guess: float):
    """One application of C(f^sign). The source is refined to gap
    2h / (2 * L) for the current expansion estimate L (finite-difference
    sampling at the edge scale, safety factor 2, learned across calls),
    mapped pointwise, thinned back to resolution h, and checked for
    h-connectivity; failure doubles L and remaps."""
    m = sys.manifold
    if len(A) == 1:
        img = iterate(sys, A.points, sign, params)
        return Continuum(manifold=m, points=img, h=A.h), L_guess
    L = max(1.0, L_guess)
    for _ in range(8):
        fine = refine(m, A, 2.0 * A.h / (2.0 * L))
        img = iterate(sys, fine.points, sign, params)
        # realized edge expansion, for the next call's estimate
        edges = _mst_edges(m, fine.points, fine.h)
        ii = np.array([e[0] for e in edges], dtype=np.intp)
        jj = np.array([e[1] for e in edges], dtype=np.intp)
        dd = np.array([e[2] for e in edges])
        ok = dd > 1e-12
        ratio = 1.0
        if np.any(ok):
            ratio = float(np.max(m.dist_many(img[ii[ok]], img[jj[ok]]) / dd[ok]))
        out = thin(m, img, A.h / 2.0)
        if h_connected(m, out, A.h):
            return Continuum(manifold=m, points=out, h=A.h), max(L, ratio)
        L = max(2.0 * L, 2.0 * ratio)
    raise ResolutionError("image not h-connected even after repeated refinement")


def induced_iterate(sys: MorseSystem, A: Continuum, n: int,
                    params: FlowParams) -> Continuum:
    """The induced map C(f)^n applied to A, one unit step at a time,
    maintaining resolution h throughout."""
    A.validate()
    if n == 0:
        return A
    sign = 1 if n > 0 else -1
    out = A
    L = 3.0
    for _ in range(abs(n)):
        out, L = _induced_one(sys, out, sign, params, L)
    return out
