"""Numerical laboratory for shadowing on a surface versus shadowing of
the induced map on its hyperspace of continua.

The time-one map of a Morse negative-gradient flow on a closed surface
has the shadowing property; this package builds, at desk scale, a
hyperspace pseudo-orbit of continua that no single continuum shadows,
and certifies both halves of that contrast numerically.
"""

from .counterexample import (BandConfig, EpsilonCertificate, LevelSets,
                             PseudoOrbit, ValidationReport, band_sets,
                             build_pseudo_orbit, build_X0, search_epsilon,
                             validate_pseudo_orbit)
from .flow import (FlowParams, Trajectory, TrajectoryPair,
                   find_trajectory_pair, integrate, iterate,
                   trajectory_through)
from .geometry import ModelManifold, sphere, torus
from .hyperspace import (Continuum, HausdorffResult, h_connected, hausdorff,
                         induced_iterate, in_neighborhood, refine, thin)
from .morse import (CriticalPoint, MorseSystem, find_critical_points,
                    moduli_dimension, sphere_height_system,
                    torus_coscos_system)
from .refuter import (RefutationCertificate, RefutationReport,
                      ShadowCandidate, base_shadow_search, classify_phi,
                      find_n0, generate_base_pseudo_orbit,
                      generate_candidates, refute, refute_all)

__version__ = "0.1.0"

__all__ = [
    "BandConfig", "Continuum", "CriticalPoint", "EpsilonCertificate",
    "FlowParams", "HausdorffResult", "LevelSets", "ModelManifold",
    "MorseSystem", "PseudoOrbit", "RefutationCertificate",
    "RefutationReport", "ShadowCandidate", "Trajectory", "TrajectoryPair",
    "ValidationReport", "band_sets", "base_shadow_search",
    "build_pseudo_orbit", "build_X0", "classify_phi", "find_critical_points",
    "find_n0", "find_trajectory_pair", "generate_base_pseudo_orbit",
    "generate_candidates", "h_connected", "hausdorff", "in_neighborhood",
    "induced_iterate", "integrate", "iterate", "moduli_dimension", "refine",
    "refute", "refute_all", "search_epsilon", "sphere",
    "sphere_height_system", "thin", "torus", "torus_coscos_system",
    "trajectory_through", "validate_pseudo_orbit",
]
