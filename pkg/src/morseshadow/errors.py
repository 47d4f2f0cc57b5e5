"""Exception types shared across the package."""


class InvalidPointError(ValueError):
    """A point is off its manifold beyond tolerance."""


class ProjectionUndefinedError(ValueError):
    """Raw coordinates cannot be projected (zero vector on the sphere)."""


class DegeneratePairError(ValueError):
    """Two critical points expected to be distinct coincide."""


class IncompleteDetectionError(RuntimeError):
    """Newton refinement failed to recover the full critical inventory."""


class InstabilityError(RuntimeError):
    """Integrator drifted off the manifold even after step halving."""


class NoConvergenceError(RuntimeError):
    """Flow did not reach a critical neighborhood within max_time."""


class PairNotFoundError(RuntimeError):
    """Fewer than two distinct connecting trajectories were found."""


class EmptyContinuumError(ValueError):
    """A continuum operation received an empty point set."""


class ResolutionError(ValueError):
    """A point sample is not connected at the requested resolution."""


class EmptyBandError(ValueError):
    """A level band contains no trajectory samples."""


class EpsilonSearchError(RuntimeError):
    """No epsilon on the bisection grid satisfied all conditions."""

    def __init__(self, message, failing_condition=None):
        super().__init__(message)
        self.failing_condition = failing_condition


class WindowTooSmallError(RuntimeError):
    """Pseudo-orbit window too short for the required end behavior."""


class PseudoOrbitInvalidError(ValueError):
    """A base-space point sequence is not a delta-pseudo-orbit."""


class N0NotFoundError(RuntimeError):
    """No backward iterate of the candidate lies inside the top set A."""
