"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
solver failures with 3, and I/O errors with 4.
"""


class MechmorphError(Exception):
    """Base class for all package errors."""


class ConfigurationError(MechmorphError):
    """Invalid grid, parameter, or option values (rejected before computing)."""


class AmplitudeOverflowError(MechmorphError):
    """A field exceeds the exp() range guard (max |u| > 700)."""


class DivergenceError(MechmorphError):
    """Time integration produced non-finite values.

    Carries the last finite state on the ``last_state`` attribute.
    """

    def __init__(self, message, last_state=None, t=None):
        super().__init__(message)
        self.last_state = last_state
        self.t = t


class ConvergenceError(MechmorphError):
    """An iterative solver failed to reach its tolerance."""


class SingularJacobianError(ConvergenceError):
    """Newton hit a (numerically) singular Jacobian, e.g. close to a fold."""


class ResolutionError(MechmorphError):
    """A consistency check failed in a way that indicates insufficient
    numerical resolution (aliasing, truncation, zero-count mismatch)."""


class BracketError(MechmorphError):
    """Root bracketing for the secular equation failed; usually a coupling
    coefficient was misclassified as zero at the current tolerance."""
