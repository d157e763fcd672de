"""Exception hierarchy shared by the library and the CLI."""


class RatesimError(Exception):
    """Base class for every error raised by ratesim."""


class DomainError(RatesimError, ValueError):
    """An input lies outside the domain of a rating formula."""


class ConfigError(RatesimError):
    """Invalid simulation configuration."""


class ConfigNotFoundError(ConfigError, FileNotFoundError):
    pass


class ConfigParseError(ConfigError):
    pass


class ConfigValueError(ConfigError, ValueError):
    pass


class MatchmakingError(RatesimError):
    """No acceptable match could be assembled from the pool."""


class UndefinedCorrelationError(RatesimError, ValueError):
    """Correlation requested on a degenerate sample."""


class ReplayMismatchError(RatesimError):
    """Re-executed run did not reproduce the recorded artifacts."""
