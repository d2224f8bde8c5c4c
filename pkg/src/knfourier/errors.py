"""Exception and warning types shared across the package."""


class KnFourierError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(KnFourierError, ValueError):
    """Argument outside the supported evaluation domain."""


class ConvergenceError(KnFourierError, ArithmeticError):
    """A series or adaptive scheme did not reach tolerance within its cap."""


class ParamError(KnFourierError, ValueError):
    """Invalid deformation or functional parameters."""


class SingularPointError(DomainError):
    """Evaluation requested at a singular point (x = 0)."""


class DegenerateInput(KnFourierError, ValueError):
    """Input carries no usable information (zero norm, too few samples)."""


class FitError(KnFourierError, ValueError):
    """Envelope fitting failed."""


class TruncationWarning(UserWarning):
    """The integrand did not decay below tolerance at the truncation radius."""
