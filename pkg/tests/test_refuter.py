import numpy as np
import pytest

from morseshadow.errors import N0NotFoundError, PseudoOrbitInvalidError
from morseshadow.flow import FlowParams, iterate
from morseshadow.hyperspace import Continuum, hausdorff, induced_iterate
from morseshadow import refuter as R

from conftest import SMALL_EPS


@pytest.fixture(scope="module")
def fast_params():
    return FlowParams(step=5e-3)


def _point_at_z(pair, which, z):
    traj = pair.gamma1 if which == 1 else pair.gamma2
    pts = traj.points
    return pts[np.argmin(np.abs(pts[:, 2] - z))]


def test_classify_phi_examples(sphere_sys, sphere_pair, level_sets,
                               fast_params):
    x1 = _point_at_z(sphere_pair, 1, 0.9)
    assert R.classify_phi(sphere_sys, x1, level_sets, SMALL_EPS, 32,
                          fast_params) == R.LABEL_ONE
    x2 = _point_at_z(sphere_pair, 2, 0.9)
    assert R.classify_phi(sphere_sys, x2, level_sets, SMALL_EPS, 32,
                          fast_params) == R.LABEL_TWO
    # the repelling fixed point never leaves its level: timeout
    assert R.classify_phi(sphere_sys, sphere_pair.p.location, level_sets,
                          SMALL_EPS, 8, fast_params) == R.LABEL_TIMEOUT
    with pytest.raises(ValueError):
        R.classify_phi(sphere_sys, x1, level_sets, SMALL_EPS, 0)


def test_find_n0_examples(sphere_sys, sphere_pair, small_po, level_sets,
                          fast_params):
    m = sphere_sys.manifold
    g1 = sphere_pair.gamma1.points
    f = sphere_sys.value(g1)
    arc = g1[(f >= 0.6) & (f <= 0.95)]
    K = Continuum(manifold=m, points=arc, h=small_po.h).validate()
    assert R.find_n0(sphere_sys, K, small_po, level_sets, fast_params) == 0
    # a candidate containing the attracting endpoint never enters A
    Kq = Continuum(manifold=m,
                   points=sphere_pair.q.location[None, :], h=small_po.h)
    with pytest.raises(N0NotFoundError):
        R.find_n0(sphere_sys, Kq, small_po, level_sets, fast_params)


def test_refute_x0_direct_violation(sphere_sys, small_po, level_sets,
                                    fast_params):
    cand = R.generate_candidates(sphere_sys, small_po, "x0_itself", 1,
                                 seed=0)[0]
    cert = R.refute(sphere_sys, small_po, cand, level_sets, fast_params)
    assert cert.verdict == R.DIRECT_VIOLATION
    assert cert.direct.value >= small_po.eps + 2 * small_po.h
    # soundness: the same image and index reproduce the value bit for bit
    img = induced_iterate(sphere_sys, cand.K, cert.direct.n, fast_params)
    brute = hausdorff(sphere_sys.manifold, img, small_po.X[cert.direct.n],
                      method="brute")
    assert brute.value == cert.direct.value


def test_refute_single_trajectory_at_center(sphere_sys, small_po,
                                            level_sets, fast_params):
    cands = R.generate_candidates(sphere_sys, small_po,
                                  "single_trajectory", 2, seed=0)
    assert len(cands) == 2
    for cand in cands:
        cert = R.refute(sphere_sys, small_po, cand, level_sets, fast_params)
        assert cert.verdict == R.DIRECT_VIOLATION
        assert cert.direct.n == 0
        # one meridian plus endpoints misses the opposite band segment
        # by more than the sphere's half-diameter
        assert cert.direct.value > 1.0


def test_structural_contradiction_on_descending_arc(sphere_sys, sphere_pair,
                                                    small_po, level_sets,
                                                    fast_params):
    m = sphere_sys.manifold
    g1 = sphere_pair.gamma1.points
    f = sphere_sys.value(g1)
    arc = g1[(f >= 0.6) & (f <= 0.95)]
    K = Continuum(manifold=m, points=arc, h=small_po.h).validate()
    cand = R.ShadowCandidate(K=K, family="arc_through_p", params={}, seed=0)
    cert = R._phase_structural(sphere_sys, small_po, cand, level_sets,
                               fast_params)
    assert cert.verdict == R.CLASSIFICATION_CONTRADICTION
    st = cert.structural
    assert st.constant_label == R.LABEL_ONE
    assert st.non_entry_verified
    assert st.violated_index is not None
    assert set(st.labels) == {R.LABEL_ONE}


def test_candidates_deterministic_and_valid(sphere_sys, small_po):
    for family in R.FAMILIES:
        count = 1 if family == "x0_itself" else 5
        a = R.generate_candidates(sphere_sys, small_po, family, count, seed=3)
        b = R.generate_candidates(sphere_sys, small_po, family, count, seed=3)
        assert len(a) == len(b)
        for ca, cb in zip(a, b):
            assert np.array_equal(ca.K.points, cb.K.points)
            assert ca.params == cb.params
            ca.K.validate()


def test_arc_candidates_satisfy_invariants(sphere_sys, small_po):
    cands = R.generate_candidates(sphere_sys, small_po, "arc_through_p", 50,
                                  seed=0)
    assert len(cands) == 50
    for c in cands:
        c.K.validate()


def test_unknown_family_rejected(sphere_sys, small_po):
    with pytest.raises(ValueError):
        R.generate_candidates(sphere_sys, small_po, "nonsense", 1, seed=0)


def test_base_search_true_orbit_exact_zero(sphere_sys):
    params = FlowParams(step=2.5e-2)
    x0 = sphere_sys.manifold.project(np.array([0.6, 0.2, 0.5]))
    orbit = [x0]
    for _ in range(29):
        orbit.append(iterate(sphere_sys, orbit[-1], 1, params))
    found, x, sup = R.base_shadow_search(sphere_sys, orbit, delta=0.01,
                                         eps=0.15, seed=0, params=params)
    assert found
    assert sup == 0.0
    assert np.array_equal(x, x0)


def test_base_search_perturbed_orbits(sphere_sys):
    params = FlowParams(step=2.5e-2)
    for seed in range(5):
        orbit = R.generate_base_pseudo_orbit(sphere_sys, 50, 0.01, seed,
                                             params)
        found, _, sup = R.base_shadow_search(sphere_sys, orbit, delta=0.01,
                                             eps=0.15, seed=seed,
                                             params=params)
        assert found and sup < 0.15


def test_base_search_rejects_invalid_pseudo_orbit(sphere_sys):
    bad = [np.array([1.0, 0.0, 0.0]), np.array([-1.0, 0.0, 0.0])]
    with pytest.raises(PseudoOrbitInvalidError):
        R.base_shadow_search(sphere_sys, bad, delta=0.01, eps=0.15)


def test_refutation_report_summary(sphere_sys, small_po, level_sets,
                                   fast_params):
    cands = R.generate_candidates(sphere_sys, small_po, "truncated_x0", 3,
                                  seed=1)
    rep = R.refute_all(sphere_sys, small_po, cands, level_sets, fast_params)
    s = rep.summary()
    assert s["total"] == 3
    assert s["direct"] + s["structural"] + s["inconclusive"] == 3
    assert s["inconclusive"] == 0
