"""Exception hierarchy for chainent."""


class ChainentError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ChainentError, ValueError):
    """A parameter lies outside the domain of the model (e.g. coupling >= 1)."""


class GeometryError(ChainentError, ValueError):
    """Block/site geometry is inconsistent with the chain."""


class ResourceLimitError(ChainentError):
    """Requested problem size exceeds a configured guard."""


class InvalidStateError(ChainentError):
    """Correlation matrices do not describe a valid (positive definite) state."""


class EigensolverError(ChainentError):
    """The dense eigensolver failed to converge."""


class SpectrumSourceError(ChainentError, ValueError):
    """A measure was applied to a spectrum of the wrong kind."""


class FitError(ChainentError, ValueError):
    """A fit could not be performed on the supplied data."""


class NoPlateauError(FitError):
    """Saturation detection found no plateau; extend the sweep range."""


class ConfigError(ChainentError, ValueError):
    """Sweep configuration failed validation.

    Attributes:
        path: dotted path of the offending field, e.g. ``grid.block_len``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
