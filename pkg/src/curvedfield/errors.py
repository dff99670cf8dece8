"""Exception types shared across the package."""


class CurvedFieldError(Exception):
    """Base class for all package errors."""


class DomainError(CurvedFieldError, ValueError):
    """Argument outside its geometric or spectral domain."""


class SpectralLatticeError(DomainError):
    """Wave number not on the discrete spectral lattice of the closed model."""


class ConvergenceError(CurvedFieldError, RuntimeError):
    """A quadrature or truncated sum failed its convergence/tail monitor."""


class AccuracyError(CurvedFieldError, RuntimeError):
    """A certified evaluation failed its self-check (e.g. ODE residual)."""


class KernelDefinitenessError(CurvedFieldError, ValueError):
    """A covariance kernel matrix is not nonnegative-definite."""


class ConfigError(CurvedFieldError, ValueError):
    """Invalid or unknown configuration input."""


class FieldFileError(CurvedFieldError, ValueError):
    """Malformed or corrupted field file."""
