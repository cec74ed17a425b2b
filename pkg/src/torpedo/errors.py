class TorpedoError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionError(TorpedoError, ValueError):
    """The requested dimension is invalid or not supported by the operation."""


class StrategyError(TorpedoError, ValueError):
    """A strategy, behaviour or operator failed validation."""


class ScalabilityError(TorpedoError):
    """The instance exceeds a documented size limit of the chosen method."""


class ConsistencyError(TorpedoError, AssertionError):
    """An unconditional identity failed; this indicates a bug, not bad input."""


__all__ = (
    'ConsistencyError',
    'DimensionError',
    'ScalabilityError',
    'StrategyError',
    'TorpedoError',
)
