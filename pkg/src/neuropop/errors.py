"""Shared exception types."""


class ConfigurationError(ValueError):
    """A structural problem: bad dimensions, bad topology, unknown option."""


class DivergenceError(RuntimeError):
    """Training produced non-finite parameters or gradients."""
