"""Exception types raised by modsample."""


class ModsampleError(ValueError):
    """Base class for all library errors."""


class InvalidInputError(ModsampleError):
    """Non-finite values, empty sequences or malformed arguments."""


class InsufficientLengthError(ModsampleError):
    """A sequence is too short for the requested difference order."""


class ConfigError(ModsampleError):
    """A configuration value is outside its admissible range."""


class OversamplingError(ConfigError):
    """The sampling step is too coarse for the order formula (T*Omega*e >= 1)."""


class GridError(ConfigError):
    """The amplitude bound is not a positive multiple of 2*lambda."""


class WindowTooShortError(ModsampleError):
    """Not enough samples to estimate the integration constants."""

    def __init__(self, required, got):
        self.required = required
        self.got = got
        super().__init__(
            f"need at least {required} samples to resolve the unknown constants, got {got}"
        )
