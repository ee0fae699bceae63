"""Exception hierarchy shared by all symsector modules."""


class SymsectorError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(SymsectorError, ValueError):
    """Invalid geometry, sector or experiment configuration."""


class SectorNonexistentError(ConfigError):
    """The requested symmetry sector has dimension zero (e.g. fermions with n > d)."""


class SizeCapError(SymsectorError):
    """A construction would exceed the configured memory/dimension cap."""


class RegimeError(SymsectorError, ValueError):
    """A closed-form formula was evaluated outside the regime where it holds."""


class EigensolverError(SymsectorError):
    """The Hermitian eigensolver failed to converge."""


class FitError(SymsectorError):
    """Not enough populated histogram bins for a fit, or no curve intersection."""


class SampleFileError(SymsectorError):
    """A sample file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
