import numpy as np
import pytest

from morseshadow.counterexample import (BandConfig, band_sets,
                                        build_pseudo_orbit)
from morseshadow.flow import FlowParams, find_trajectory_pair
from morseshadow.morse import sphere_height_system, torus_coscos_system


@pytest.fixture(scope="session")
def sphere_sys():
    return sphere_height_system()


@pytest.fixture(scope="session")
def torus_sys():
    return torus_coscos_system()


@pytest.fixture(scope="session")
def flow_params():
    return FlowParams()


@pytest.fixture(scope="session")
def sphere_pair(sphere_sys, flow_params):
    return find_trajectory_pair(sphere_sys, flow_params)


@pytest.fixture(scope="session")
def torus_pair(torus_sys, flow_params):
    return find_trajectory_pair(torus_sys, flow_params)


@pytest.fixture(scope="session")
def band():
    return BandConfig(a=-1.0, b=1.0, a1=-0.5, b1=0.5)


SMALL_EPS = 0.45
SMALL_DELTA = 0.2
SMALL_N = 8


@pytest.fixture(scope="session")
def small_po(sphere_sys, sphere_pair, band):
    """A short flagship pseudo-orbit shared by the heavier unit tests."""
    return build_pseudo_orbit(sphere_sys, sphere_pair, band,
                              eps=SMALL_EPS, delta=SMALL_DELTA, N=SMALL_N)


@pytest.fixture(scope="session")
def level_sets(sphere_sys, sphere_pair, band, small_po):
    return band_sets(sphere_sys, sphere_pair, band, SMALL_EPS,
                     x0=small_po.X[0], h=small_po.h)
