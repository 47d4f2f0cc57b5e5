"""Deterministic SVG 1.1 figures.

Sphere scenes use an orthographic projection (view along +y, so x maps
right and z maps up); torus scenes draw the flat unit square. All
coordinates are written with fixed decimal formatting, so the same
input always yields byte-identical output.
"""

from typing import Optional

import numpy as np

from .counterexample import LevelSets, PseudoOrbit
from .geometry import SPHERE
from .hyperspace import Continuum

_W = 640
_H = 640
_MARGIN = 40

_SNAPSHOT_COLORS = ["#c0c0c0", "#9a9a9a", "#747474", "#4e4e4e", "#282828"]


def _proj(m_kind: str, pts: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(pts)
    if m_kind == SPHERE:
        # orthographic: scene x -> canvas x, scene z -> canvas y (up)
        u = pts[:, 0]
        v = pts[:, 2]
        span = 2.0
        off = -1.0
    else:
        u = pts[:, 0]
        v = pts[:, 1]
        span = 1.0
        off = 0.0
    scale = (_W - 2 * _MARGIN) / span
    cx = _MARGIN + (u - off) * scale
    cy = _H - _MARGIN - (v - off) * scale
    return np.stack([cx, cy], axis=1)


def _f(x: float) -> str:
    return f"{x:.3f}"


def _dots(canvas_pts: np.ndarray, color: str, r: float = 1.6,
          opacity: float = 1.0) -> str:
    rows = [
        f'<circle cx="{_f(px)}" cy="{_f(py)}" r="{_f(r)}" '
        f'fill="{color}" fill-opacity="{_f(opacity)}"/>'
        for px, py in canvas_pts
    ]
    return "\n".join(rows)


def _layer(name: str, body: str) -> str:
    return f'<g id="{name}">\n{body}\n</g>'


def _frame(kind: str) -> str:
    if kind == SPHERE:
        cx, cy = _proj(kind, np.array([[0.0, 0.0, 0.0]]))[0]
        r = (_W - 2 * _MARGIN) / 2.0
        return (f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" '
                f'fill="none" stroke="#000000" stroke-width="1"/>')
    a = _proj(kind, np.array([[0.0, 0.0]]))[0]
    b = _proj(kind, np.array([[1.0, 1.0]]))[0]
    x, y = min(a[0], b[0]), min(a[1], b[1])
    w, h = abs(b[0] - a[0]), abs(b[1] - a[1])
    return (f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" '
            f'height="{_f(h)}" fill="none" stroke="#000000" '
            f'stroke-width="1"/>')


def _document(kind: str, layers: list) -> str:
    body = "\n".join(layers)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">\n'
        f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>\n'
        f'{_frame(kind)}\n'
        f"{body}\n"
        "</svg>\n"
    )


def _eps_outline(kind: str, seg_pts: np.ndarray, eps: float,
                 color: str) -> str:
    # dashed circles of (projected) radius eps around a thin subsample
    # of the band segment trace out the neighborhood outline
    scale = (_W - 2 * _MARGIN) / (2.0 if kind == SPHERE else 1.0)
    idx = np.linspace(0, len(seg_pts) - 1, min(12, len(seg_pts)))
    idx = np.unique(idx.astype(int))
    rows = []
    for px, py in _proj(kind, seg_pts[idx]):
        rows.append(
            f'<circle cx="{_f(px)}" cy="{_f(py)}" r="{_f(eps * scale)}" '
            f'fill="none" stroke="{color}" stroke-width="0.8" '
            f'stroke-dasharray="4 3" stroke-opacity="0.6"/>'
        )
    return "\n".join(rows)


def _snapshot_indices(N: int) -> list:
    if N == 0:
        return [0]
    return sorted({-N, -N // 2, 0, N // 2, N})


def render_pseudo_orbit(po: PseudoOrbit, ls: Optional[LevelSets] = None) -> str:
    """Scene with the connecting trajectories (as X0), the band segments
    with their eps-neighborhood outlines, and five window snapshots."""
    kind = po.X[0].manifold.kind
    layers = [
        _layer("x0", _dots(_proj(kind, po.X[0].points), "#1f77b4")),
    ]
    if ls is not None:
        layers.append(_layer("band_A1", _dots(
            _proj(kind, ls.A1.points), "#ff7f0e", r=2.0)))
        layers.append(_layer("band_A2", _dots(
            _proj(kind, ls.A2.points), "#d62728", r=2.0)))
        layers.append(_layer("eps_outline_A1",
                             _eps_outline(kind, ls.A1.points, po.eps,
                                          "#ff7f0e")))
        layers.append(_layer("eps_outline_A2",
                             _eps_outline(kind, ls.A2.points, po.eps,
                                          "#d62728")))
    for color, n in zip(_SNAPSHOT_COLORS, _snapshot_indices(po.N)):
        layers.append(_layer(
            f"snapshot_{n}",
            _dots(_proj(kind, po.X[n].points), color, r=1.2, opacity=0.9),
        ))
    return _document(kind, layers)


def render_refutation(po: PseudoOrbit, K: Continuum, witness=None,
                      ls: Optional[LevelSets] = None) -> str:
    """Pseudo-orbit scene plus the candidate and, if present, the
    violation witness segment."""
    kind = po.X[0].manifold.kind
    base = render_pseudo_orbit(po, ls)
    extra = [_layer("candidate", _dots(_proj(kind, K.points),
                                       "#9467bd", r=2.2))]
    if witness is not None:
        a, b = _proj(kind, np.stack([witness[0], witness[1]]))
        extra.append(_layer(
            "violation_witness",
            f'<line x1="{_f(a[0])}" y1="{_f(a[1])}" '
            f'x2="{_f(b[0])}" y2="{_f(b[1])}" '
            f'stroke="#9467bd" stroke-width="2"/>',
        ))
    return base.replace("</svg>\n", "\n".join(extra) + "\n</svg>\n")


def render_svg(po: PseudoOrbit, ls: Optional[LevelSets] = None,
               candidate: Optional[Continuum] = None,
               witness=None) -> str:
    """Figure for a pseudo-orbit, optionally with a refuted candidate."""
    if candidate is None:
        return render_pseudo_orbit(po, ls)
    return render_refutation(po, candidate, witness=witness, ls=ls)
