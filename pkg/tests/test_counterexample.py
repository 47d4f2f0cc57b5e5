import numpy as np
import pytest

from morseshadow.counterexample import (BandConfig, _truncation_sets,
                                        band_sets, build_pseudo_orbit,
                                        build_X0, search_epsilon,
                                        validate_pseudo_orbit)
from morseshadow.errors import WindowTooSmallError
from morseshadow.flow import FlowParams
from morseshadow.hyperspace import hausdorff

from conftest import SMALL_DELTA, SMALL_EPS, SMALL_N


def test_band_config_invariant():
    with pytest.raises(ValueError):
        BandConfig(a=-1.0, b=1.0, a1=0.5, b1=-0.5)
    with pytest.raises(ValueError):
        BandConfig(a=-0.2, b=1.0, a1=-0.5, b1=0.5)


def test_x0_contains_endpoints_and_connects(sphere_sys, sphere_pair):
    m = sphere_sys.manifold
    x0 = build_X0(m, sphere_pair, h=0.02)
    d_p, _ = m.min_dist_to(sphere_pair.p.location[None, :], x0.points)
    d_q, _ = m.min_dist_to(sphere_pair.q.location[None, :], x0.points)
    assert float(d_p[0]) == 0.0 and float(d_q[0]) == 0.0
    f = sphere_sys.value(x0.points)
    assert f.max() == pytest.approx(1.0, abs=1e-9)
    assert f.min() == pytest.approx(-1.0, abs=1e-9)
    x0.validate()


def test_band_segments_reach_exact_levels(sphere_sys, sphere_pair, band,
                                          level_sets):
    for seg in (level_sets.A1, level_sets.A2):
        f = sphere_sys.value(seg.points)
        assert f.min() == pytest.approx(band.a1, abs=1e-9)
        assert f.max() == pytest.approx(band.b1, abs=1e-9)
        assert np.all((f >= band.a1 - 1e-9) & (f <= band.b1 + 1e-9))


def test_band_segment_gap_closed_form(sphere_sys, level_sets):
    """Antipodal meridian band segments at |z| <= 1/2 come closest at the
    band corners, at chordal distance sqrt(3)."""
    m = sphere_sys.manifold
    gap, _ = m.min_dist_to(level_sets.A1.points, level_sets.A2.points)
    assert float(np.min(gap)) == pytest.approx(np.sqrt(3.0), abs=1e-9)


def test_level_set_membership(sphere_sys, level_sets, sphere_pair):
    near_p = sphere_sys.manifold.project(np.array([0.1, 0.0, 1.0]))
    assert level_sets.in_A(sphere_sys, near_p)[0]
    assert not level_sets.in_B(sphere_sys, near_p)[0]
    near_q = sphere_sys.manifold.project(np.array([0.1, 0.0, -1.0]))
    assert level_sets.in_B(sphere_sys, near_q)[0]
    # a point near the band but far from X0 is in neither set
    off = sphere_sys.manifold.project(np.array([0.0, 1.0, 0.9]))
    assert not level_sets.in_A(sphere_sys, off)[0]


def test_search_epsilon_certificate(sphere_sys, sphere_pair, band):
    x0 = build_X0(sphere_sys.manifold, sphere_pair, h=0.00625)
    cert = search_epsilon(sphere_sys, x0, sphere_pair, band,
                          n_samples=2000, bisection_iters=4, seed=0)
    assert cert.eps >= 0.25
    assert all(v > 0.0 for v in cert.margins())
    # the no-jump minimum sits exactly on the b1 level: closed form
    exact = np.tanh(np.arctanh(band.b1) - 1.0) - band.a1
    assert cert.nojump_min_excess == pytest.approx(exact, abs=1e-6)
    # ball condition: B(p, 2 eps) inside {F > b1} means eps < 1/2 here
    assert cert.eps < 0.5


def test_truncation_time_is_minimal(sphere_sys, sphere_pair, small_po):
    m = sphere_sys.manifold
    x0 = small_po.X[0]
    M = small_po.M
    back, fwd = _truncation_sets(m, sphere_pair, M, small_po.h)
    assert hausdorff(m, back, x0).value < SMALL_DELTA / 2.0
    assert hausdorff(m, fwd, x0).value < SMALL_DELTA / 2.0
    back1, fwd1 = _truncation_sets(m, sphere_pair, M - 1, small_po.h)
    assert max(hausdorff(m, back1, x0).value,
               hausdorff(m, fwd1, x0).value) >= SMALL_DELTA / 2.0


def test_pseudo_orbit_window_and_validation(sphere_sys, small_po):
    assert sorted(small_po.X) == list(range(-SMALL_N, SMALL_N + 1))
    rep = validate_pseudo_orbit(sphere_sys, small_po)
    assert rep.ok
    assert rep.max_link < SMALL_DELTA - 2 * small_po.h
    assert rep.end_forward < SMALL_EPS / 2.0
    assert rep.end_backward < SMALL_EPS / 2.0


def test_window_too_small_raises(sphere_sys, sphere_pair, band):
    with pytest.raises(WindowTooSmallError):
        build_pseudo_orbit(sphere_sys, sphere_pair, band, eps=SMALL_EPS,
                           delta=SMALL_DELTA, N=3)


def test_resolution_guard(sphere_sys, sphere_pair, band):
    with pytest.raises(ValueError):
        build_pseudo_orbit(sphere_sys, sphere_pair, band, eps=SMALL_EPS,
                           delta=0.1, N=8, h=0.05)


def test_band_sets_default_x0(sphere_sys, sphere_pair, band):
    ls = band_sets(sphere_sys, sphere_pair, band, eps=0.4)
    assert ls.eps == 0.4
    assert len(ls.x0) > 0
