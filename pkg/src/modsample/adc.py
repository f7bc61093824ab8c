"""Self-reset ADC front end: folding, bounded noise and mid-rise quantization."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .numerics import as_sequence, fold


@dataclass(frozen=True)
class ModuloAdcConfig:
    """Folding threshold plus optional noise level and bit depth.

    Corruptions are applied in hardware order: fold, then additive noise,
    then quantization.
    """

    threshold: float
    bits: Optional[int] = None
    noise_bound: Optional[float] = None
    noise_seed: object = 0

    def __post_init__(self):
        if not (np.isfinite(self.threshold) and self.threshold > 0):
            raise ConfigError(f"threshold must be positive, got {self.threshold}")
        if self.bits is not None and int(self.bits) < 1:
            raise ConfigError(f"bits must be >= 1, got {self.bits}")
        if self.noise_bound is not None and not self.noise_bound >= 0:
            raise ConfigError(f"noise_bound must be >= 0, got {self.noise_bound}")


def codebook(bits, threshold):
    """Sorted mid-rise levels ``+-(2n+1)*threshold/2**bits``, ``2**bits`` of them."""
    bits = int(bits)
    if bits < 1:
        raise ConfigError(f"bits must be >= 1, got {bits}")
    half = 2 ** (bits - 1)
    step = 2.0 * threshold / 2**bits
    return (np.arange(-half, half) + 0.5) * step


def quantize(y, bits, threshold):
    """Round each sample to the nearest level of :func:`codebook`.

    Midpoints between two levels go to the more positive one.  Inputs
    outside ``[-threshold, threshold]`` saturate at the outermost level.
    For in-range inputs the error is at most ``threshold / 2**bits``.
    """
    y = as_sequence(y, "y")
    bits = int(bits)
    if bits < 1:
        raise ConfigError(f"bits must be >= 1, got {bits}")
    half = 2 ** (bits - 1)
    step = 2.0 * threshold / 2**bits
    cell = np.clip(np.floor(y / step), -half, half - 1)
    return (cell + 0.5) * step


def add_bounded_noise(y, b0, seed):
    """Add i.i.d. noise uniform on ``[-b0, b0]`` drawn from ``default_rng(seed)``."""
    y = as_sequence(y, "y")
    if not (np.isfinite(b0) and b0 >= 0):
        raise ConfigError(f"noise bound must be >= 0, got {b0}")
    if b0 == 0:
        return y.copy()
    rng = np.random.default_rng(seed)
    return y + rng.uniform(-b0, b0, size=y.size)


def acquire(gamma, cfg):
    """Simulate the ADC on ideal samples `gamma`."""
    y = fold(as_sequence(gamma, "gamma"), cfg.threshold)
    if cfg.noise_bound is not None:
        y = add_bounded_noise(y, cfg.noise_bound, cfg.noise_seed)
    if cfg.bits is not None:
        y = quantize(y, cfg.bits, cfg.threshold)
    return y


def saturate(x, limit):
    """Conventional clipping ADC transfer curve, ``clip(x, -limit, limit)``."""
    return np.clip(as_sequence(x, "x"), -limit, limit)
