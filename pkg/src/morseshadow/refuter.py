"""Refutation engine for candidate shadowing continua, plus the
base-space positive control.

A candidate K claims to eps-shadow the hyperspace pseudo-orbit {X_n}.
`refute` produces a machine-checkable certificate that it does not:
either a direct Hausdorff violation at some window index, or a
structural contradiction — every point of the backward image K0 =
C(f)^{-n0}(K) funnels into the eps-neighborhood of the same band
segment and can never reach the other one, while some X_m meets that
other segment, forcing a Hausdorff error of at least eps.

`base_shadow_search` is the positive control in the base space: the
time-one map itself has the shadowing property, so a derivative-free
search around the head of a point pseudo-orbit should locate a true
shadowing orbit.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .counterexample import LevelSets, PseudoOrbit
from .errors import N0NotFoundError, PseudoOrbitInvalidError
from .flow import FlowParams, integrate, iterate
from .hyperspace import Continuum, _induced_one, hausdorff, thin
from .morse import MorseSystem

LABEL_ONE = 1
LABEL_TWO = 2
LABEL_TIMEOUT = 0

DIRECT_VIOLATION = "DirectViolation"
CLASSIFICATION_CONTRADICTION = "ClassificationContradiction"
INCONCLUSIVE = "Inconclusive"

FAMILIES = (
    "x0_itself",
    "single_trajectory",
    "truncated_x0",
    "arc_through_p",
    "orbit_translate",
)

# midpoint bisection between mixed labels stops at this edge gap
_BISECT_GAP = 1e-6


@dataclass(frozen=True, eq=False)
class ShadowCandidate:
    """A continuum offered as an eps-shadow of the whole orbit {X_n}."""

    K: Continuum
    family: str
    params: Dict[str, float]
    seed: int


@dataclass(frozen=True, eq=False)
class DirectEvidence:
    """d_H(C(f)^n(K), X_n) >= eps + 2h at window index n."""

    n: int
    value: float
    witness_ab: tuple  # (point of image, nearest point of X_n)
    witness_ba: tuple  # (point of X_n, nearest point of image)


@dataclass(frozen=True, eq=False)
class StructuralEvidence:
    """Every point of K0 = C(f)^{-n0}(K) carries the same label i and no
    forward iterate up to the horizon enters the eps-neighborhood of the
    other band segment, while X_m meets that segment."""

    n0: int
    labels: tuple
    constant_label: Optional[int]
    horizon: int
    non_entry_verified: bool
    violated_index: Optional[int]
    witnesses: tuple = ()


@dataclass(frozen=True, eq=False)
class RefutationCertificate:
    verdict: str
    candidate: ShadowCandidate
    direct: Optional[DirectEvidence] = None
    structural: Optional[StructuralEvidence] = None


@dataclass(frozen=True, eq=False)
class RefutationReport:
    certificates: tuple
    eps: float
    threshold: float

    def summary(self):
        counts = {DIRECT_VIOLATION: 0, CLASSIFICATION_CONTRADICTION: 0,
                  INCONCLUSIVE: 0}
        for c in self.certificates:
            counts[c.verdict] += 1
        return {
            "total": len(self.certificates),
            "direct": counts[DIRECT_VIOLATION],
            "structural": counts[CLASSIFICATION_CONTRADICTION],
            "inconclusive": counts[INCONCLUSIVE],
        }


def _label_batch(sys: MorseSystem, pts: np.ndarray, ls: LevelSets,
                 eps: float, T: int, params: FlowParams) -> np.ndarray:
    """Forward-iterate a batch of points up to T unit steps, labeling each
    by its first entry into U_eps(A1) (-> 1) or U_eps(A2) (-> 2)."""
    m = sys.manifold
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    labels = np.zeros(len(pts), dtype=int)
    live = np.arange(len(pts))
    cur = pts.copy()
    for _ in range(T + 1):
        d1, _ = m.min_dist_to(cur, ls.A1.points)
        d2, _ = m.min_dist_to(cur, ls.A2.points)
        hit1 = d1 < eps
        hit2 = d2 < eps
        if np.any(hit1 & hit2):
            raise ValueError(
                "a point lies within eps of both band segments; the "
                "neighborhood-disjointness certificate is violated"
            )
        labels[live[hit1]] = LABEL_ONE
        labels[live[hit2]] = LABEL_TWO
        keep = ~(hit1 | hit2)
        if not np.any(keep):
            return labels
        live = live[keep]
        cur = integrate(sys, cur[keep], 1.0, params)
    return labels


def classify_phi(sys: MorseSystem, x, ls: LevelSets, eps: float, T: int,
                 params: Optional[FlowParams] = None) -> int:
    """Label a single point by the first of U_eps(A1) / U_eps(A2) its
    forward orbit enters within T steps; 0 means timeout.

    The two neighborhoods are disjoint for a certified eps, so the label
    is well defined.
    """
    if T < 1:
        raise ValueError(f"horizon T must be >= 1, got {T}")
    params = params or FlowParams()
    return int(_label_batch(sys, x, ls, eps, T, params)[0])


def _backward_chain(sys, K, params):
    """Yield (n0, C(f)^{-n0}(K)) for n0 = 0, 1, 2, ... incrementally."""
    cur, L = K, 3.0
    n0 = 0
    yield n0, cur
    while True:
        n0 += 1
        cur, L = _induced_one(sys, cur, -1, params, L)
        yield n0, cur


def find_n0(sys: MorseSystem, K: Continuum, po: PseudoOrbit, ls: LevelSets,
            params: Optional[FlowParams] = None) -> int:
    """Smallest n0 <= N with every point of C(f)^{-n0}(K) inside the top
    set A (within eps of X0 and F >= b1)."""
    n0, _ = _find_n0(sys, K, po, ls, params or FlowParams())
    return n0


def _find_n0(sys, K, po, ls, params) -> Tuple[int, Continuum]:
    for n0, img in _backward_chain(sys, K, params):
        if bool(np.all(ls.in_A(sys, img.points))):
            return n0, img
        if n0 >= po.N:
            raise N0NotFoundError(
                f"no backward iterate within A for n0 <= {po.N}"
            )


def _directed_witness(m, P, Q):
    """(value, (attaining point of P, nearest point of Q)) for the
    directed Hausdorff distance sup_P inf_Q d."""
    best, arg = m.min_dist_to(P, Q)
    i = int(np.argmax(best))
    return float(best[i]), (P[i].copy(), Q[arg[i]].copy())


def _phase_direct(sys, po, cand, threshold, params):
    """Scan n = 0, +1, -1, +2, -2, ... over the window for the first index
    with d_H(C(f)^n(K), X_n) >= threshold."""
    m = sys.manifold
    fwd = {"img": cand.K, "L": 3.0, "n": 0}
    bwd = {"img": cand.K, "L": 3.0, "n": 0}
    order = [0]
    for k in range(1, po.N + 1):
        order.extend([k, -k])
    for n in order:
        side = fwd if n >= 0 else bwd
        while abs(side["n"]) < abs(n):
            side["img"], side["L"] = _induced_one(
                sys, side["img"], 1 if n > 0 else -1, params, side["L"])
            side["n"] += 1 if n > 0 else -1
        img = side["img"]
        vab, wab = _directed_witness(m, img.points, po.X[n].points)
        vba, wba = _directed_witness(m, po.X[n].points, img.points)
        value = max(vab, vba)
        if value >= threshold:
            return DirectEvidence(n=n, value=value, witness_ab=wab,
                                  witness_ba=wba)
    return None


def _bisect_mixed_edge(sys, ls, eps, T, params, a, b, la, lb):
    """Shrink a segment with differently-labeled endpoints down to gap
    _BISECT_GAP; returns the final endpoints and labels."""
    m = sys.manifold
    for _ in range(64):
        if m.dist_many(a, b) <= _BISECT_GAP:
            break
        mid = m.interpolate(a, b, 0.5)
        lm = int(_label_batch(sys, mid, ls, eps, T, params)[0])
        if lm == la:
            a = mid
        else:
            b, lb = mid, lm
    return a, b, la, lb


def _phase_structural(sys, po, cand, ls, params):
    """Step-4 argument on the backward image K0: constant label plus
    verified non-entry into the other neighborhood contradicts some X_m
    meeting that band segment."""
    m = sys.manifold
    eps = po.eps
    horizon = 4 * po.N

    # a candidate point within 2h of p has no exit time; its forward
    # images always meet B(p, 2h) while X_N collapses toward q, so the
    # window end yields a direct violation instead
    p = po.X[-po.N].points[
        int(np.argmax(sys.value(po.X[-po.N].points)))]
    near_p, _ = m.min_dist_to(cand.K.points, p[None, :])
    if np.any(near_p <= 2.0 * cand.K.h):
        img = cand.K
        L = 3.0
        for _ in range(po.N):
            img, L = _induced_one(sys, img, 1, params, L)
        vab, wab = _directed_witness(m, img.points, po.X[po.N].points)
        vba, wba = _directed_witness(m, po.X[po.N].points, img.points)
        return RefutationCertificate(
            verdict=DIRECT_VIOLATION, candidate=cand,
            direct=DirectEvidence(n=po.N, value=max(vab, vba),
                                  witness_ab=wab, witness_ba=wba))

    try:
        n0, K0 = _find_n0(sys, cand.K, po, ls, params)
    except N0NotFoundError:
        return RefutationCertificate(
            verdict=INCONCLUSIVE, candidate=cand,
            structural=StructuralEvidence(
                n0=-1, labels=(), constant_label=None, horizon=horizon,
                non_entry_verified=False, violated_index=None))

    labels = _label_batch(sys, K0.points, ls, eps, horizon, params)
    seen = sorted(set(int(v) for v in labels))
    if LABEL_TIMEOUT in seen or len(seen) != 1:
        witnesses = []
        if set(seen) == {LABEL_ONE, LABEL_TWO}:
            i1 = int(np.argmax(labels == LABEL_ONE))
            i2 = int(np.argmax(labels == LABEL_TWO))
            a, b, la, lb = _bisect_mixed_edge(
                sys, ls, eps, horizon, params,
                K0.points[i1], K0.points[i2], LABEL_ONE, LABEL_TWO)
            witnesses = [(a, la), (b, lb)]
        return RefutationCertificate(
            verdict=INCONCLUSIVE, candidate=cand,
            structural=StructuralEvidence(
                n0=n0, labels=tuple(int(v) for v in labels),
                constant_label=None, horizon=horizon,
                non_entry_verified=False, violated_index=None,
                witnesses=tuple(witnesses)))

    label = seen[0]
    other = ls.A2 if label == LABEL_ONE else ls.A1

    # trapping check: no forward iterate of K0 up to the horizon may
    # enter the eps-neighborhood of the other band segment
    cur = K0.points.copy()
    non_entry = True
    for _ in range(horizon + 1):
        d, _ = m.min_dist_to(cur, other.points)
        if np.any(d < eps):
            non_entry = False
            break
        cur = integrate(sys, cur, 1.0, params)
    if not non_entry:
        return RefutationCertificate(
            verdict=INCONCLUSIVE, candidate=cand,
            structural=StructuralEvidence(
                n0=n0, labels=tuple(int(v) for v in labels),
                constant_label=label, horizon=horizon,
                non_entry_verified=False, violated_index=None))

    violated = None
    for n in sorted(po.X):
        d, _ = m.min_dist_to(po.X[n].points, other.points)
        if np.min(d) <= 2.0 * po.h:
            violated = n
            break
    return RefutationCertificate(
        verdict=CLASSIFICATION_CONTRADICTION, candidate=cand,
        structural=StructuralEvidence(
            n0=n0, labels=tuple(int(v) for v in labels),
            constant_label=label, horizon=horizon,
            non_entry_verified=True, violated_index=violated))


def refute(sys: MorseSystem, po: PseudoOrbit, cand: ShadowCandidate,
           ls: LevelSets,
           params: Optional[FlowParams] = None) -> RefutationCertificate:
    """Certificate that the candidate does not eps-shadow {X_n}.

    Phase 1 scans the window for a direct Hausdorff violation at
    threshold eps + 2h (the sampling slack of two resolutions). Phase 2
    runs the classification argument on K0 = C(f)^{-n0}(K). All outcomes
    are certificate variants; Inconclusive is an honest failure to
    certify, never a claimed contradiction.
    """
    params = params or FlowParams(step=5e-3)
    threshold = po.eps + 2.0 * po.h
    direct = _phase_direct(sys, po, cand, threshold, params)
    if direct is not None:
        return RefutationCertificate(verdict=DIRECT_VIOLATION,
                                     candidate=cand, direct=direct)
    return _phase_structural(sys, po, cand, ls, params)


def refute_all(sys: MorseSystem, po: PseudoOrbit,
               candidates: List[ShadowCandidate], ls: LevelSets,
               params: Optional[FlowParams] = None) -> RefutationReport:
    """Refute every candidate; certificates aggregated in input order."""
    certs = tuple(refute(sys, po, c, ls, params) for c in candidates)
    return RefutationReport(certificates=certs, eps=po.eps,
                            threshold=po.eps + 2.0 * po.h)


def _critical_endpoints(sys, po):
    """(p, q) recovered from the collapsed window ends."""
    p = po.X[-po.N].points[int(np.argmax(sys.value(po.X[-po.N].points)))]
    q = po.X[po.N].points[int(np.argmin(sys.value(po.X[po.N].points)))]
    return p, q


def _level_clip(sys, pts, level, keep_above=True):
    fv = sys.value(pts)
    return pts[fv >= level] if keep_above else pts[fv <= level]


def generate_candidates(sys: MorseSystem, po: PseudoOrbit, family: str,
                        count: int, seed: int) -> List[ShadowCandidate]:
    """Seeded family members; the same seed reproduces the same list."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; one of {FAMILIES}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    m = sys.manifold
    h = po.h
    X0 = po.X[0]
    p, q = _critical_endpoints(sys, po)
    rng = np.random.default_rng(
        np.random.SeedSequence([seed, FAMILIES.index(family)]))
    out: List[ShadowCandidate] = []

    if family == "x0_itself":
        out.append(ShadowCandidate(K=X0, family=family, params={}, seed=seed))

    elif family == "single_trajectory":
        # split X0 minus its endpoints into its two trajectory arcs and
        # re-attach p and q to each
        body = X0.points
        keep = (m.dist_many(body, p) > 2 * h) & (m.dist_many(body, q) > 2 * h)
        body = body[keep]
        half = _split_arcs(m, body, h)
        for i, arc in enumerate(half[:max(2, count)]):
            pts = [p[None, :], arc, q[None, :]]
            for end in (p, q):
                d, j = m.min_dist_to(end[None, :], arc)
                pts.append(_bridge(m, end, arc[int(j[0])], h))
            pts = thin(m, np.concatenate(pts), h / 2.0)
            out.append(ShadowCandidate(
                K=Continuum(manifold=m, points=pts, h=h).validate(),
                family=family, params={"arc": float(i)}, seed=seed))

    elif family == "truncated_x0":
        a1, b1 = po.band.a1, po.band.b1
        for i in range(count):
            c = float(rng.uniform(a1, b1))
            pts = np.concatenate([_level_clip(sys, X0.points, c), p[None, :]])
            pts = thin(m, pts, h / 2.0)
            out.append(ShadowCandidate(
                K=Continuum(manifold=m, points=pts, h=h).validate(),
                family=family, params={"level": c}, seed=seed))

    elif family == "arc_through_p":
        lo = po.band.b1 + 0.25 * (sys.value(p[None, :])[0] - po.band.b1)
        hi = po.band.b1 + 0.90 * (sys.value(p[None, :])[0] - po.band.b1)
        for i in range(count):
            c = float(rng.uniform(lo, hi))
            pts = np.concatenate([_level_clip(sys, X0.points, c), p[None, :]])
            pts = thin(m, pts, h / 2.0)
            out.append(ShadowCandidate(
                K=Continuum(manifold=m, points=pts, h=h).validate(),
                family=family, params={"level": c}, seed=seed))

    elif family == "orbit_translate":
        ks = [int(k) for k in rng.choice(
            [k for k in range(-po.N, po.N + 1) if k != 0],
            size=min(count, 2 * po.N), replace=False)]
        for k in ks:
            out.append(ShadowCandidate(
                K=po.X[k], family=family, params={"k": float(k)}, seed=seed))

    return out[:count] if family != "single_trajectory" else out


def _bridge(m, a, b, gap):
    """Interior points subdividing the a--b segment at spacing <= gap."""
    d = float(m.dist_many(a, b))
    k = int(np.ceil(d / gap))
    if k <= 1:
        return np.empty((0, m.ambient_dim))
    w = np.arange(1, k) / k
    return m.interpolate(a[None, :], b[None, :], w)


def _split_arcs(m, pts, h):
    """Partition points into connected components at resolution h,
    largest first."""
    n = len(pts)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    from .hyperspace import _adjacency_edges
    for i, j, _d in _adjacency_edges(m, pts, 2.0 * h):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    comps: Dict[int, list] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    groups = sorted(comps.values(), key=lambda g: (-len(g), g[0]))
    return [pts[np.array(g, dtype=np.intp)] for g in groups]


def _orbit_sup(sys, starts, base_po, params):
    """sup_n d(f^n(x), x_n) for a batch of starting points, computed by
    the same incremental unit-time composition used to build true
    orbits (a true orbit therefore scores exactly 0.0)."""
    m = sys.manifold
    cur = np.atleast_2d(np.asarray(starts, dtype=float)).copy()
    sup = m.dist_many(cur, base_po[0])
    for x_n in base_po[1:]:
        cur = integrate(sys, cur, 1.0, params)
        sup = np.maximum(sup, m.dist_many(cur, x_n))
    return sup


def validate_base_pseudo_orbit(sys: MorseSystem, base_po, delta: float,
                               params: FlowParams) -> float:
    """Max link error d(f(x_n), x_{n+1}); raises if >= delta."""
    pts = np.asarray(base_po, dtype=float)
    if len(pts) < 2:
        raise PseudoOrbitInvalidError("need at least two points")
    img = integrate(sys, pts[:-1], 1.0, params)
    links = sys.manifold.dist_many(img, pts[1:])
    worst = float(np.max(links))
    if worst >= delta:
        raise PseudoOrbitInvalidError(
            f"link error {worst:.6g} >= delta = {delta:.6g} "
            f"at index {int(np.argmax(links))}"
        )
    return worst


def generate_base_pseudo_orbit(sys: MorseSystem, length: int, delta: float,
                               seed: int,
                               params: Optional[FlowParams] = None):
    """Seeded point delta-pseudo-orbit: unit-time images nudged by a
    random tangent perturbation of size < delta/2 at every step."""
    params = params or FlowParams(step=2.5e-2)
    m = sys.manifold
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    x = m.random_points(1, rng)[0]
    orbit = [x]
    for _ in range(length - 1):
        y = iterate(sys, orbit[-1], 1, params)
        t = rng.normal(size=m.ambient_dim)
        if m.ambient_dim == 3:
            t -= np.dot(t, y) * y
        t /= np.linalg.norm(t)
        size = 0.4 * delta * rng.uniform()
        orbit.append(m.project(y + size * t))
    return orbit


def base_shadow_search(sys: MorseSystem, base_po, delta: float, eps: float,
                       seed: int = 0,
                       params: Optional[FlowParams] = None,
                       max_evals: int = 40):
    """Derivative-free search for a point whose true orbit eps-shadows
    the point pseudo-orbit.

    Multi-start compass search over a two-parameter tangent chart at
    x_0, minimizing sup_n d(f^n(x), x_n); found = (sup_err < eps).
    """
    params = params or FlowParams(step=2.5e-2)
    m = sys.manifold
    base_po = [np.asarray(x, dtype=float) for x in base_po]
    validate_base_pseudo_orbit(sys, base_po, delta, params)

    x0 = base_po[0]
    basis = m.tangent_basis(x0)
    rng = np.random.default_rng(np.random.SeedSequence([seed]))

    def chart(uv):
        raw = x0 + uv @ basis if m.ambient_dim == 3 else x0 + uv
        out = m.project(raw)
        # a zero offset must reproduce the head bit-for-bit so that a
        # true orbit self-shadows with sup_err exactly 0.0
        zero = np.all(uv == 0.0, axis=1)
        if np.any(zero):
            out[zero] = x0
        return out

    # head starts: the head itself plus seeded offsets at the delta scale
    n_starts = 4
    offsets = np.concatenate([
        np.zeros((1, 2)),
        rng.normal(scale=4.0 * delta, size=(n_starts - 1, 2)),
    ])
    sups = _orbit_sup(sys, chart(offsets), base_po, params)
    evals = len(offsets)
    order = np.argsort(sups, kind="stable")
    best_uv = offsets[order[0]]
    best = float(sups[order[0]])

    step = 4.0 * delta
    dirs = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    while best >= eps and evals < max_evals and step > 1e-6:
        poll = best_uv[None, :] + step * dirs
        vals = _orbit_sup(sys, chart(poll), base_po, params)
        evals += len(poll)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, best_uv = float(vals[i]), poll[i]
        else:
            step *= 0.5
    return best < eps, chart(best_uv[None, :])[0], best
