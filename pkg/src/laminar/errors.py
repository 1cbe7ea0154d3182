"""Exception types raised by the toolkit."""


class LaminarError(Exception):
    """Base class for all toolkit errors."""


class DomainError(LaminarError, ValueError):
    """A point or parameter lies outside the region where a map is defined."""


class PreconditionError(LaminarError, ValueError):
    """An operation was called on inputs that violate its hypotheses."""


class SingularityError(DomainError):
    """Evaluation hit a removable-only-in-theory singularity (apex, zero gap)."""


class ConfigurationError(LaminarError, ValueError):
    """A grid, quadrature or experiment configuration is unusable."""
