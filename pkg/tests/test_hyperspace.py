import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morseshadow.errors import (EmptyContinuumError, InvalidPointError,
                                ResolutionError)
from morseshadow.flow import FlowParams
from morseshadow.geometry import sphere, torus
from morseshadow.hyperspace import (Continuum, h_connected, hausdorff,
                                    in_neighborhood, induced_iterate, refine,
                                    thin)

MANIFOLDS = [sphere(), torus()]


def _cloud(m, seed, n):
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    return Continuum(manifold=m, points=m.random_points(n, rng), h=0.05)


def _meridian(z_lo=-0.999, z_hi=0.999, n=400):
    # uniform in colatitude so chord spacing stays uniform near the poles
    theta = np.linspace(np.arccos(z_hi), np.arccos(z_lo), n)
    return np.stack([np.sin(theta), np.zeros(n), np.cos(theta)], axis=1)


def test_empty_continuum_rejected():
    with pytest.raises(EmptyContinuumError):
        Continuum(manifold=sphere(), points=np.empty((0, 3)), h=0.1)


def test_validate_rejects_off_manifold():
    pts = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.4]])
    with pytest.raises(InvalidPointError):
        Continuum(manifold=sphere(), points=pts, h=1.0).validate()


def test_validate_rejects_disconnected():
    pts = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    with pytest.raises(ResolutionError):
        Continuum(manifold=sphere(), points=pts, h=0.01).validate()


def test_h_connected_arc():
    m = sphere()
    arc = _meridian(n=200)
    assert h_connected(m, arc, 0.02)
    assert not h_connected(m, arc[::20], 0.02)


@pytest.mark.parametrize("m", MANIFOLDS, ids=[m.kind for m in MANIFOLDS])
@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=20, deadline=None)
def test_hausdorff_metric_properties(m, seed):
    A = _cloud(m, seed, 25)
    B = _cloud(m, seed + 1, 30)
    C = _cloud(m, seed + 2, 20)
    dab = hausdorff(m, A, B).value
    assert dab == hausdorff(m, B, A).value
    assert hausdorff(m, A, A).value == 0.0
    dac = hausdorff(m, A, C).value
    dcb = hausdorff(m, C, B).value
    assert dab <= dac + dcb + 1e-12


@pytest.mark.parametrize("m", MANIFOLDS, ids=[m.kind for m in MANIFOLDS])
@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=20, deadline=None)
def test_grid_equals_brute_bitwise(m, seed):
    A = _cloud(m, seed, 60)
    B = _cloud(m, seed + 10, 45)
    rb = hausdorff(m, A, B, method="brute")
    rg = hausdorff(m, A, B, method="grid")
    assert rb.value == rg.value
    assert np.array_equal(rb.witness_ab[0], rg.witness_ab[0])
    assert np.array_equal(rb.witness_ba[0], rg.witness_ba[0])


def test_hausdorff_witness_attains_value():
    m = sphere()
    A = _cloud(m, 5, 40)
    B = _cloud(m, 6, 40)
    r = hausdorff(m, A, B)
    d_ab = m.dist(*r.witness_ab)
    d_ba = m.dist(*r.witness_ba)
    assert max(d_ab, d_ba) == r.value


def test_in_neighborhood(sphere_sys):
    m = sphere()
    A = Continuum(manifold=m, points=_meridian(), h=0.02)
    near = m.project(np.array([1.0, 0.05, 0.0]))
    far = np.array([-1.0, 0.0, 0.0])
    assert in_neighborhood(m, near, A, 0.1)
    assert not in_neighborhood(m, far, A, 0.5)
    with pytest.raises(ValueError):
        in_neighborhood(m, near, A, -0.1)


def test_refine_closes_gaps():
    m = sphere()
    sparse = Continuum(manifold=m, points=_meridian(n=40), h=0.1)
    fine = refine(m, sparse, 0.02)
    assert fine.h == pytest.approx(0.01)
    assert h_connected(m, fine.points, fine.h)
    # refinement only adds intermediate points: the original set is
    # still within the refined one
    best, _ = m.min_dist_to(sparse.points, fine.points)
    assert np.max(best) == 0.0


def test_thin_stays_close():
    m = sphere()
    pts = _meridian(n=1000)
    radius = 0.05
    out = thin(m, pts, radius)
    assert len(out) < len(pts)
    A = Continuum(manifold=m, points=pts, h=radius)
    B = Continuum(manifold=m, points=out, h=radius)
    assert hausdorff(m, A, B).value <= radius


def test_induced_map_meridian_oracle(sphere_sys):
    """C(f) of a latitude circle is the latitude circle one time unit
    down: z1 = tanh(artanh z0 - 1)."""
    m = sphere_sys.manifold
    params = FlowParams()
    h = 0.02
    phi = np.linspace(0.0, 2 * np.pi, 600, endpoint=False)
    z0 = 0.4
    r0 = np.sqrt(1 - z0 ** 2)
    circle = Continuum(manifold=m, points=np.stack(
        [r0 * np.cos(phi), r0 * np.sin(phi), np.full_like(phi, z0)], axis=1),
        h=h).validate()
    img = induced_iterate(sphere_sys, circle, 1, params)
    z1 = np.tanh(np.arctanh(z0) - 1.0)
    r1 = np.sqrt(1 - z1 ** 2)
    exact = Continuum(manifold=m, points=np.stack(
        [r1 * np.cos(phi), r1 * np.sin(phi), np.full_like(phi, z1)], axis=1),
        h=h)
    assert img.validate() is img
    assert hausdorff(m, img, exact).value <= 2 * h


def test_induced_iterate_identity_and_inverse(sphere_sys):
    m = sphere_sys.manifold
    params = FlowParams()
    h = 0.02
    arc = Continuum(manifold=m, points=_meridian(-0.6, 0.6, 300),
                    h=h).validate()
    assert induced_iterate(sphere_sys, arc, 0, params) is arc
    round_trip = induced_iterate(
        sphere_sys, induced_iterate(sphere_sys, arc, 1, params), -1, params)
    assert hausdorff(m, round_trip, arc).value <= 2 * h
