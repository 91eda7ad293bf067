"""Exception hierarchy shared by all modules."""


class CavityEntError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(CavityEntError):
    """A numerical routine could not produce a trustworthy result."""


class NotHermitianError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class SingularMatrixError(NumericalError):
    pass


class DimensionOverflowError(NumericalError):
    """Raised when a dense object would exceed the configured size limit."""


class NormOverflowError(NumericalError):
    pass


class TraceDriftError(NumericalError):
    """Integrator lost more trace than allowed before renormalisation."""


class ResidualError(NumericalError):
    pass


class LayoutError(CavityEntError, ValueError):
    """Operator or state does not match the Hilbert-space layout."""


class JumpProbabilityError(NumericalError):
    """Photon-jump probability vanishes so the conditional state is undefined."""


class ConfigError(CavityEntError, ValueError):
    pass


class InvalidStateError(CavityEntError, ValueError):
    """Matrix is not a valid density matrix within tolerance."""
