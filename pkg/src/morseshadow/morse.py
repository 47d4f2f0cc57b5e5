"""Built-in Morse functions on the model surfaces.

Two systems are provided: the height function z on the sphere and
cos(2*pi*u) + cos(2*pi*v) on the flat torus. Values, tangential
gradients and Hessian eigenvalues are closed form; Newton refinement
from a seed grid recovers the critical inventory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePairError, IncompleteDetectionError
from .geometry import SPHERE, TORUS, ModelManifold, sphere, torus

SPHERE_HEIGHT = "sphere_height"
TORUS_COSCOS = "torus_coscos"

TWO_PI = 2.0 * np.pi

# complete inventory sizes for the built-in systems
_EXPECTED_COUNT = {SPHERE_HEIGHT: 2, TORUS_COSCOS: 4}


@dataclass(frozen=True)
class MorseSystem:
    manifold: ModelManifold
    function_id: str
    newton_tol: float = 1e-12

    def __post_init__(self):
        ok = (
            (self.function_id == SPHERE_HEIGHT and self.manifold.kind == SPHERE)
            or (self.function_id == TORUS_COSCOS and self.manifold.kind == TORUS)
        )
        if not ok:
            raise ValueError(
                f"{self.function_id!r} is not defined on {self.manifold.kind!r}"
            )

    def value(self, pts):
        pts = np.asarray(pts, dtype=float)
        if self.function_id == SPHERE_HEIGHT:
            return pts[..., 2]
        return np.cos(TWO_PI * pts[..., 0]) + np.cos(TWO_PI * pts[..., 1])

    def gradient(self, pts):
        """Tangential gradient of F at pts (broadcasts)."""
        pts = np.asarray(pts, dtype=float)
        if self.function_id == SPHERE_HEIGHT:
            g = np.zeros_like(pts)
            g[..., 2] = 1.0
            z = pts[..., 2]
            return g - z[..., None] * pts
        return -TWO_PI * np.sin(TWO_PI * pts)

    def hessian_eigenvalues(self, p):
        """Eigenvalues of the Hessian of F restricted to the surface at a
        critical point p."""
        p = np.asarray(p, dtype=float)
        if self.function_id == SPHERE_HEIGHT:
            # height function on the unit sphere: both curvature directions
            # contribute -z at the poles
            return np.array([-p[2], -p[2]])
        return -TWO_PI**2 * 2.0 * np.cos(TWO_PI * p)


@dataclass(frozen=True)
class CriticalPoint:
    location: np.ndarray
    value: float
    index: int
    hessian_eigenvalues: tuple

    def __repr__(self):
        loc = np.array2string(np.asarray(self.location), precision=6)
        return f"CriticalPoint(loc={loc}, F={self.value:.6g}, index={self.index})"


def sphere_height_system() -> MorseSystem:
    return MorseSystem(sphere(), SPHERE_HEIGHT)


def torus_coscos_system() -> MorseSystem:
    return MorseSystem(torus(), TORUS_COSCOS)


def system_from_id(function_id: str) -> MorseSystem:
    if function_id == SPHERE_HEIGHT:
        return sphere_height_system()
    if function_id == TORUS_COSCOS:
        return torus_coscos_system()
    raise ValueError(f"unknown system id: {function_id!r}")


def evaluate(sys: MorseSystem, x):
    """(F(x), tangential gradient at x); x validated against the manifold."""
    sys.manifold.check_point(x)
    x = np.asarray(x, dtype=float)
    return float(sys.value(x)), sys.gradient(x)


def _newton_sphere(sys, seeds, iters=40):
    m = sys.manifold
    x = m.project(seeds)
    for _ in range(iters):
        g = sys.gradient(x)
        z = x[..., 2]
        safe = np.abs(z) > 1e-3
        step = np.where(safe[..., None], g / np.where(safe, z, 1.0)[..., None], 0.0)
        x = m.project(x + step)
    return x


def _newton_torus(sys, seeds, iters=40):
    x = np.array(seeds, dtype=float)
    for _ in range(iters):
        g = sys.gradient(x)
        h = -TWO_PI**2 * 2.0 * np.cos(TWO_PI * x)
        safe = np.abs(h) > 1e-6
        x = np.mod(x - np.where(safe, g / np.where(safe, h, 1.0), 0.0), 1.0)
    return x


def find_critical_points(sys: MorseSystem, grid=32):
    """All critical points of the built-in system, Newton-refined from a
    seed grid and deduplicated; sorted by decreasing F value."""
    m = sys.manifold
    if m.kind == SPHERE:
        th = np.linspace(0.0, np.pi, grid)
        ph = np.linspace(0.0, TWO_PI, grid, endpoint=False)
        T, P = np.meshgrid(th, ph, indexing="ij")
        seeds = np.stack(
            [np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1
        ).reshape(-1, 3)
        refined = _newton_sphere(sys, seeds)
    else:
        u = np.linspace(0.0, 1.0, grid, endpoint=False)
        U, V = np.meshgrid(u, u, indexing="ij")
        seeds = np.stack([U, V], axis=-1).reshape(-1, 2)
        refined = _newton_torus(sys, seeds)

    gn = np.sqrt(np.einsum("ij,ij->i", sys.gradient(refined), sys.gradient(refined)))
    refined = refined[gn < sys.newton_tol]
    if len(refined) == 0:
        raise IncompleteDetectionError("no Newton run converged")

    kept = []
    for pt in refined:
        if all(m.dist_many(pt, k) > 1e-6 for k in kept):
            kept.append(pt)

    out = []
    for loc in kept:
        eigs = sys.hessian_eigenvalues(loc)
        if np.any(np.abs(eigs) < sys.newton_tol):
            raise IncompleteDetectionError(f"degenerate Hessian at {loc}")
        out.append(
            CriticalPoint(
                location=loc,
                value=float(sys.value(loc)),
                index=int(np.sum(eigs < 0.0)),
                hessian_eigenvalues=tuple(float(e) for e in eigs),
            )
        )
    if len(out) != _EXPECTED_COUNT[sys.function_id]:
        raise IncompleteDetectionError(
            f"found {len(out)} critical points, expected "
            f"{_EXPECTED_COUNT[sys.function_id]}"
        )
    out.sort(key=lambda c: (-c.value, tuple(np.round(c.location, 9))))
    return out


def moduli_dimension(sys: MorseSystem, p: CriticalPoint, q: CriticalPoint):
    """(dim of the connecting-trajectory space, dim of its unparametrized
    quotient) for the pair p -> q; either may be negative (emptiness)."""
    if sys.manifold.dist_many(p.location, q.location) <= 1e-9:
        raise DegeneratePairError("p and q coincide")
    dim_m = p.index - q.index
    return dim_m, dim_m - 1
