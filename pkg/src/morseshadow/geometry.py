"""Model closed surfaces: the round sphere and the flat torus.

Points live in ambient coordinates: shape (3,) unit vectors for the
sphere, shape (2,) coordinates reduced mod 1 for the torus. All
operations accept stacked arrays of points (leading axes broadcast).

The sphere carries the chordal (ambient Euclidean) distance, the torus
the flat quotient distance; both are the metrics every epsilon/delta in
this package refers to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPointError, ProjectionUndefinedError

SPHERE = "sphere2"
TORUS = "torus2"


@dataclass(frozen=True)
class ModelManifold:
    """Descriptor of a built-in closed surface with its metric."""

    kind: str
    on_manifold_tol: float = 1e-9

    def __post_init__(self):
        if self.kind not in (SPHERE, TORUS):
            raise ValueError(f"unknown manifold kind: {self.kind!r}")

    @property
    def dimension(self) -> int:
        return 2

    @property
    def ambient_dim(self) -> int:
        return 3 if self.kind == SPHERE else 2

    @property
    def diameter(self) -> float:
        # chordal diameter of the sphere; half-diagonal of the unit square
        return 2.0 if self.kind == SPHERE else float(np.sqrt(0.5))

    # -- validity ------------------------------------------------------

    def is_valid(self, pts) -> bool:
        pts = np.asarray(pts, dtype=float)
        if pts.shape[-1] != self.ambient_dim:
            return False
        if self.kind == SPHERE:
            r2 = np.einsum("...k,...k->...", pts, pts)
            return bool(np.all(np.abs(r2 - 1.0) <= self.on_manifold_tol))
        return bool(np.all((pts >= 0.0) & (pts < 1.0)))

    def check_point(self, pts):
        if not self.is_valid(pts):
            raise InvalidPointError(
                f"point off {self.kind} beyond tolerance {self.on_manifold_tol}"
            )

    # -- projection ----------------------------------------------------

    def project(self, raw):
        """Send raw coordinates to the manifold (normalize / reduce mod 1)."""
        raw = np.asarray(raw, dtype=float)
        if self.kind == SPHERE:
            norms = np.sqrt(np.einsum("...k,...k->...", raw, raw))
            if np.any(norms == 0.0):
                raise ProjectionUndefinedError("cannot project the zero vector")
            return raw / norms[..., None]
        return np.mod(raw, 1.0)

    # -- distances -----------------------------------------------------

    def dist(self, a, b) -> float:
        """Distance between two single points (validated)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        self.check_point(a)
        self.check_point(b)
        return float(self.dist_many(a, b))

    def dist_many(self, a, b):
        """Broadcasted distances, no validity check."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.kind == SPHERE:
            d = a - b
            return np.sqrt(np.einsum("...k,...k->...", d, d))
        d = np.abs(a - b)
        d = np.minimum(d, 1.0 - d)
        return np.sqrt(np.einsum("...k,...k->...", d, d))

    def pairwise_dist(self, A, B):
        """Full |A| x |B| distance matrix."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        return self.dist_many(A[:, None, :], B[None, :, :])

    def min_dist_to(self, x, P, chunk=2048):
        """For each point in x, the min distance to the set P (and argmin)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        P = np.atleast_2d(np.asarray(P, dtype=float))
        best = np.empty(len(x))
        arg = np.empty(len(x), dtype=np.intp)
        for lo in range(0, len(x), chunk):
            hi = min(lo + chunk, len(x))
            d = self.pairwise_dist(x[lo:hi], P)
            arg[lo:hi] = np.argmin(d, axis=1)
            best[lo:hi] = d[np.arange(hi - lo), arg[lo:hi]]
        return best, arg

    # -- tangent structure ---------------------------------------------

    def tangent_basis(self, p):
        """Deterministic orthonormal basis of the tangent plane at p."""
        p = np.asarray(p, dtype=float)
        if self.kind == TORUS:
            return np.eye(2)
        k = int(np.argmin(np.abs(p)))
        e = np.zeros(3)
        e[k] = 1.0
        t1 = e - np.dot(e, p) * p
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(p, t1)
        return np.stack([t1, t2])

    def interpolate(self, a, b, w):
        """Point(s) a fraction w of the way from a to b along the shortest path.

        Sphere: slerp along the great circle (falls back to normalized
        chord for nearly parallel inputs). Torus: mod-1 straight segment.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        w = np.asarray(w, dtype=float)
        if self.kind == TORUS:
            d = np.mod(b - a + 0.5, 1.0) - 0.5
            return np.mod(a + w[..., None] * d if w.ndim else a + w * d, 1.0)
        dot = np.clip(np.einsum("...k,...k->...", a, b), -1.0, 1.0)
        ang = np.arccos(dot)
        s = np.sin(ang)
        wa = np.where(s > 1e-9, np.sin((1.0 - w) * ang) / np.where(s > 1e-9, s, 1.0), 1.0 - w)
        wb = np.where(s > 1e-9, np.sin(w * ang) / np.where(s > 1e-9, s, 1.0), w)
        out = wa[..., None] * a + wb[..., None] * b if np.ndim(wa) else wa * a + wb * b
        return self.project(out)

    def point_at_chord(self, p, direction, chord):
        """Point at exact chordal distance `chord` from p along a unit
        tangent direction."""
        p = np.asarray(p, dtype=float)
        direction = np.asarray(direction, dtype=float)
        chord = np.asarray(chord, dtype=float)
        if self.kind == TORUS:
            return np.mod(p + chord[..., None] * direction if chord.ndim else p + chord * direction, 1.0)
        theta = 2.0 * np.arcsin(np.clip(chord / 2.0, -1.0, 1.0))
        c = np.cos(theta)
        s = np.sin(theta)
        if chord.ndim:
            return c[..., None] * p + s[..., None] * direction
        return c * p + s * direction

    def random_points(self, n, rng):
        if self.kind == SPHERE:
            v = rng.normal(size=(n, 3))
            return self.project(v)
        return rng.uniform(0.0, 1.0, size=(n, 2))


def sphere() -> ModelManifold:
    return ModelManifold(SPHERE)


def torus() -> ModelManifold:
    return ModelManifold(TORUS)
