"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`LowInertiaError`, so callers (the CLI in particular) can map
failures onto exit codes without catching unrelated bugs.
"""


class LowInertiaError(Exception):
    """Base class for all package errors."""


class NoEquilibrium(LowInertiaError, ValueError):
    """The torque exceeds the coupling: no synchronous fixed point exists."""


class BoundaryWarning(UserWarning):
    """Torque ratio sits exactly on the stability boundary |sin delta| = 1."""


class TruncationTooSmall(LowInertiaError, ValueError):
    pass


class DefectiveMatrix(LowInertiaError):
    """Eigen-decomposition residual too large to trust the eigenvectors."""


class NotConverged(LowInertiaError):
    pass


class SingularStep(LowInertiaError):
    """An inversion inside the matrix continued fraction is ill-conditioned."""


class DegenerateNormalization(LowInertiaError, ValueError):
    """delta_I == delta_II, so the normalized rotor angle is undefined."""


class Overdamped(LowInertiaError):
    pass


class DomainError(LowInertiaError, ValueError):
    pass


class PeakAtBoundary(LowInertiaError):
    pass


class NoExtremum(LowInertiaError):
    pass


class EnvelopeUndefined(LowInertiaError):
    pass


class StepFailure(LowInertiaError):
    """The adaptive integrator's step size underflowed."""


class ReductionViolated(LowInertiaError):
    """Grid clones in an N-body run drifted apart."""


class ScenarioError(LowInertiaError, ValueError):
    """Malformed or inconsistent scenario file."""
