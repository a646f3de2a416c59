"""Exception hierarchy shared by all modules."""


class CRTwistError(Exception):
    """Base class for every error raised by the package."""


class DomainError(CRTwistError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NumericalFailure(CRTwistError, ArithmeticError):
    """An iterative method did not reach its tolerance.

    The offending residuals are kept on ``residuals`` for diagnostics.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class NonGeneralError(CRTwistError):
    """The modulus is not general (some discriminant or denominator vanishes)."""


class SingularIntegrandError(NonGeneralError):
    """A quadrature integrand has a pole inside the integration range."""


class AccuracyError(CRTwistError):
    """A conserved quantity or group constraint drifted beyond tolerance."""


class PoleError(DomainError):
    """A point sits at the pole of the Heisenberg projection."""


class DegeneracyError(CRTwistError):
    """A winding computation met a (near) zero sample or hit the axis."""


class UndersamplingError(CRTwistError):
    """Consecutive samples are too far apart to unwrap the phase reliably."""
