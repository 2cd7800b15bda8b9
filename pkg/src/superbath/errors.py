"""Exception types shared across the package."""


class SingularityError(ValueError):
    """Evaluation requested exactly at a singular point (band edge, m = 1, ...)."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to reach its tolerance.

    ``estimate`` carries the achieved error estimate when one is available.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ConfigError(ValueError):
    """Invalid or malformed experiment configuration."""
