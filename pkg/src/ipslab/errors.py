"""Exception types shared across the package."""


class IpslabError(ValueError):
    """Base class for all ipslab errors."""


class ParameterError(IpslabError):
    """A parameter is outside its documented range."""


class PreconditionError(IpslabError):
    """An operation's precondition is violated."""


class DomainError(IpslabError):
    """An argument is outside the mathematical domain of the function."""


class ConfigError(IpslabError):
    """Malformed or unknown experiment configuration."""


class DegenerateLandscapeError(IpslabError):
    """Free-energy landscape lacks the curvature needed for the requested quantity."""


class NumericalError(IpslabError):
    """An iterative numerical scheme failed to converge."""
