"""Exception and warning types shared across the package."""


class KsurfError(Exception):
    """Base class for domain errors raised by this package."""


class DomainError(KsurfError):
    """Input outside the geometric domain (e.g. nonpositive height)."""


class DegenerateImmersionError(KsurfError):
    """The graph quantity u + u_xx vanished; the map is not an immersion."""


class DegenerateEndError(KsurfError):
    """The end has no usable asymptotic radius (r = 0)."""


class SmallnessError(KsurfError):
    """Input data violates the smallness threshold of an iteration scheme."""


class ConvergenceError(KsurfError):
    """An iterative solver failed to converge."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CutoffError(KsurfError):
    """A truncation parameter produced an unreasonably large index set."""


class ConstraintError(KsurfError):
    """Combinatorial admissibility constraint violated."""


class RateCollisionWarning(UserWarning):
    """Two decay rates in a fit were close enough to merge."""


class TailTruncationWarning(UserWarning):
    """A semi-infinite integral was truncated with a non-negligible tail."""
