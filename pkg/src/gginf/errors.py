class ConfigError(ValueError):
    """Invalid simulation parameters, seeds or laws; raised before any work starts."""


class SamplingDomainError(ValueError):
    """A sampler received a uniform or parameter outside its domain."""


class TrajectoryError(ValueError):
    """Corrupt event input, e.g. a negative running state."""
