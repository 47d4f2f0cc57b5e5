import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morseshadow.errors import InvalidPointError, ProjectionUndefinedError
from morseshadow.geometry import ModelManifold, SPHERE, TORUS, sphere, torus

MANIFOLDS = [sphere(), torus()]


def _points(m: ModelManifold, seed: int, n: int = 8) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    return m.random_points(n, rng)


@pytest.mark.parametrize("m", MANIFOLDS, ids=[m.kind for m in MANIFOLDS])
def test_basic_attributes(m):
    assert m.dimension == 2
    assert m.ambient_dim == (3 if m.kind == SPHERE else 2)
    assert m.diameter > 0


@pytest.mark.parametrize("m", MANIFOLDS, ids=[m.kind for m in MANIFOLDS])
@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_metric_axioms(m, seed):
    pts = _points(m, seed, n=6)
    d = m.pairwise_dist(pts, pts)
    assert np.allclose(d, d.T)
    assert np.all(np.diag(d) == 0.0)
    assert np.all(d >= 0.0)
    assert np.all(d <= m.diameter + 1e-12)
    # triangle inequality over all index triples
    for i in range(6):
        for j in range(6):
            for k in range(6):
                assert d[i, j] <= d[i, k] + d[k, j] + 1e-12


@pytest.mark.parametrize("m", MANIFOLDS, ids=[m.kind for m in MANIFOLDS])
@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_project_idempotent_and_valid(m, seed):
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    raw = rng.normal(scale=2.0, size=(5, m.ambient_dim))
    if m.kind == TORUS:
        raw = rng.uniform(-3.0, 3.0, size=(5, 2))
    p = m.project(raw)
    assert m.is_valid(p)
    assert np.allclose(m.project(p), p, atol=1e-12)


def test_project_zero_vector_rejected():
    with pytest.raises(ProjectionUndefinedError):
        sphere().project(np.zeros(3))


def test_check_point_rejects_off_manifold():
    with pytest.raises(InvalidPointError):
        sphere().check_point(np.array([0.0, 0.0, 1.5]))


def test_torus_quotient_metric():
    m = torus()
    a = np.array([0.05, 0.0])
    b = np.array([0.95, 0.0])
    assert m.dist(a, b) == pytest.approx(0.1, abs=1e-15)
    # opposite corners of the fundamental square are half-period apart
    assert m.dist(np.array([0.0, 0.0]), np.array([0.5, 0.5])) == (
        pytest.approx(np.sqrt(0.5), abs=1e-15))


def test_sphere_chordal_metric():
    m = sphere()
    n = np.array([0.0, 0.0, 1.0])
    s = np.array([0.0, 0.0, -1.0])
    assert m.dist(n, s) == pytest.approx(2.0, abs=1e-15)
    e = np.array([1.0, 0.0, 0.0])
    assert m.dist(n, e) == pytest.approx(np.sqrt(2.0), abs=1e-15)


@pytest.mark.parametrize("m", MANIFOLDS, ids=[m.kind for m in MANIFOLDS])
@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_interpolate_endpoints_and_shortening(m, seed):
    pts = _points(m, seed, n=2)
    a, b = pts
    assert m.dist(m.interpolate(a, b, 0.0), a) < 1e-9
    assert m.dist(m.interpolate(a, b, 1.0), b) < 1e-9
    mid = m.interpolate(a, b, 0.5)
    assert m.is_valid(mid[None, :] if mid.ndim == 1 else mid)
    d = m.dist(a, b)
    # the geodesic midpoint is equidistant from both ends and strictly
    # closer than the full separation (chordal distances on the sphere
    # exceed half the end-to-end chord, so d/2 is not a valid bound)
    assert m.dist(a, mid) == pytest.approx(m.dist(mid, b), abs=1e-9)
    assert m.dist(a, mid) <= d + 1e-9


@pytest.mark.parametrize("m", MANIFOLDS, ids=[m.kind for m in MANIFOLDS])
@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_point_at_chord_exact(m, seed):
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    base = m.random_points(1, rng)[0]
    t = m.tangent_basis(base)[0]
    chord = float(rng.uniform(0.01, 0.4))
    out = m.point_at_chord(base, t, np.asarray(chord))
    assert m.is_valid(out[None, :])
    assert m.dist(base, out) == pytest.approx(chord, abs=1e-12)


@pytest.mark.parametrize("m", MANIFOLDS, ids=[m.kind for m in MANIFOLDS])
def test_tangent_basis_orthonormal(m):
    for p in _points(m, 7, n=5):
        B = m.tangent_basis(p)
        assert np.allclose(B @ B.T, np.eye(len(B)), atol=1e-12)
        if m.kind == SPHERE:
            assert np.allclose(B @ p, 0.0, atol=1e-12)


@pytest.mark.parametrize("m", MANIFOLDS, ids=[m.kind for m in MANIFOLDS])
def test_min_dist_to_matches_pairwise(m):
    X = _points(m, 11, n=40)
    P = _points(m, 12, n=60)
    best, arg = m.min_dist_to(X, P)
    D = m.pairwise_dist(X, P)
    assert np.array_equal(best, D.min(axis=1))
    assert np.array_equal(arg, D.argmin(axis=1))
