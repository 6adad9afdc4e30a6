"""Exception types raised by the numerical routines."""


class DecomcError(Exception):
    """Base class for all package errors."""


class NonConvergence(DecomcError):
    """A root bracket or contour tail test could not be satisfied."""


class QuadratureFailure(DecomcError):
    """An adaptive quadrature missed its error target."""


class TruncationError(DecomcError):
    """A truncated Fock sum drops more weight than allowed."""


class ShellTooLarge(DecomcError):
    """Requested energy shell exceeds the enumeration guard."""


class DegenerateFit(DecomcError):
    """Scaling fit has no spread in the abscissa."""


class ConfigError(DecomcError):
    """Scenario configuration failed to parse or validate."""
