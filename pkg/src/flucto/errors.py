"""Exception hierarchy shared by all modules."""


class FluctoError(Exception):
    """Base class for every error raised by :mod:`flucto`."""


class ParameterError(FluctoError, ValueError):
    """An :class:`~flucto.model.AtomParams` invariant is violated."""


class DomainError(FluctoError, ValueError):
    """A quantity is requested outside the domain where it is finite."""


class SingularSystemError(FluctoError, ArithmeticError):
    """A linear solve failed or was too ill-conditioned to trust."""


class EngineMismatchError(FluctoError, ValueError):
    """Explicit parameters and a prebuilt system disagree."""


class ZeroDenominatorError(FluctoError, ZeroDivisionError):
    """A normalizing mean vanishes (e.g. the phi=0 quadrature without offset)."""


class IntegrationError(FluctoError, RuntimeError):
    """Numerical integration (ODE or quadrature) did not converge."""
