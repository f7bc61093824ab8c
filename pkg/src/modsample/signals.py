"""Bandlimited test signals with a piecewise-constant even spectrum."""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, InvalidInputError
from .numerics import as_sequence

DEFAULT_NUM_BINS = 16
DEFAULT_OVERSAMPLE = 32


@dataclass(frozen=True)
class BandlimitedSignal:
    """Real signal whose spectrum is ``c_l`` on ``omega_{l-1} <= |w| < omega_l``.

    The time-domain form follows from the Fourier pair of a symmetric band
    indicator::

        g(t) = scale/pi * sum_l c_l * (sin(w_l t) - sin(w_{l-1} t)) / t

    which is evaluated as ``dw * cos(w_mid t) * sinc(dw t / 2pi)`` per bin to
    avoid the cancellation near ``t = 0``.
    """

    bin_edges: tuple
    bin_heights: tuple
    omega: float
    scale: float = 1.0
    seed: object = None

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        heights = np.asarray(self.bin_heights, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise ConfigError("need at least one spectral bin")
        if heights.size != edges.size - 1:
            raise ConfigError("bin_heights must have one entry per bin")
        if edges[0] != 0.0 or np.any(np.diff(edges) <= 0):
            raise ConfigError("bin_edges must start at 0 and be strictly increasing")
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ConfigError(f"omega must be positive, got {self.omega}")
        if edges[-1] > self.omega * (1 + 1e-12):
            raise ConfigError("last bin edge exceeds the bandwidth")
        if not np.all(np.isfinite(heights)):
            raise ConfigError("bin heights must be finite")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ConfigError(f"scale must be positive, got {self.scale}")
        object.__setattr__(self, "bin_edges", tuple(float(e) for e in edges))
        object.__setattr__(self, "bin_heights", tuple(float(c) for c in heights))
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def num_bins(self):
        return len(self.bin_heights)

    def __call__(self, t):
        return evaluate(self, t)

    def scaled(self, factor):
        """Return a copy with amplitude multiplied by `factor` (> 0)."""
        return replace(self, scale=self.scale * float(factor))

    def to_dict(self):
        seed = self.seed if isinstance(self.seed, (int, type(None))) else str(self.seed)
        return {
            "bin_edges": list(self.bin_edges),
            "bin_heights": list(self.bin_heights),
            "omega": self.omega,
            "scale": self.scale,
            "seed": seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            bin_edges=tuple(d["bin_edges"]),
            bin_heights=tuple(d["bin_heights"]),
            omega=d["omega"],
            scale=d.get("scale", 1.0),
            seed=d.get("seed"),
        )


@dataclass(frozen=True)
class SamplingGrid:
    """Uniform sampling instants ``origin + k*step`` for ``k = 0..count-1``."""

    step: float
    count: int
    origin: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.step) and self.step > 0):
            raise ConfigError(f"step must be positive, got {self.step}")
        if int(self.count) < 1:
            raise ConfigError(f"count must be >= 1, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def centered(cls, step, count):
        """Grid with ``t = 0`` on the middle sample."""
        return cls(step=step, count=count, origin=-(int(count) // 2) * step)

    def times(self):
        return self.origin + self.step * np.arange(self.count)

    @property
    def window(self):
        return (self.origin, self.origin + (self.count - 1) * self.step)


def evaluate(sig, t):
    """Value of `sig` at time(s) `t` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    edges = np.asarray(sig.bin_edges)
    heights = np.asarray(sig.bin_heights)
    width = np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    tt = t[..., None]
    terms = heights * width * np.cos(mid * tt) * np.sinc(width * tt / (2 * np.pi))
    out = sig.scale / np.pi * terms.sum(axis=-1)
    if out.ndim == 0:
        return float(out)
    return out


def sample(sig, grid):
    """Point samples ``g(origin + k*step)`` as a float array."""
    return np.asarray(evaluate(sig, grid.times()), dtype=float)


def sup_norm_estimate(sig, window, oversample=DEFAULT_OVERSAMPLE):
    """Max of ``|g|`` over a grid of spacing ``pi/(omega*oversample)`` on `window`.

    The grid starts at ``window[0]`` and always includes ``window[1]``, so
    doubling `oversample` refines the grid and can only raise the estimate.
    """
    t_min, t_max = (float(w) for w in window)
    if not (np.isfinite(t_min) and np.isfinite(t_max)) or t_max <= t_min:
        raise InvalidInputError(f"degenerate window {window!r}")
    if int(oversample) < 1:
        raise InvalidInputError("oversample must be >= 1")
    step = np.pi / (sig.omega * int(oversample))
    n = int(np.floor((t_max - t_min) / step))
    t = t_min + step * np.arange(n + 1)
    t = np.append(t, t_max)
    return float(np.max(np.abs(evaluate(sig, t))))


def random_bandlimited(seed, num_bins=DEFAULT_NUM_BINS, omega=np.pi, window=None,
                       oversample=DEFAULT_OVERSAMPLE):
    """Random signal with ``num_bins`` equal-width spectral bins on ``[0, omega]``.

    Heights are i.i.d. U(0, 1) drawn from ``numpy.random.default_rng(seed)``.
    The result is scaled so that its sup-norm estimate on `window` is 1.
    With nonnegative heights ``|g(t)| <= g(0)``, so any window containing
    ``t = 0`` (the default is ``[0, 2*pi/omega]``) normalizes the true
    sup-norm over the real line.
    """
    num_bins = int(num_bins)
    if num_bins < 1:
        raise ConfigError(f"num_bins must be >= 1, got {num_bins}")
    if not (np.isfinite(omega) and omega > 0):
        raise ConfigError(f"omega must be positive, got {omega}")
    rng = np.random.default_rng(seed)
    heights = rng.uniform(0.0, 1.0, size=num_bins)
    edges = np.linspace(0.0, omega, num_bins + 1)
    sig = BandlimitedSignal(bin_edges=tuple(edges), bin_heights=tuple(heights),
                            omega=omega, seed=seed)
    if window is None:
        window = (0.0, 2 * np.pi / omega)
    peak = sup_norm_estimate(sig, window, oversample)
    return replace(sig, scale=1.0 / peak)


def sinc_reconstruct(samples, step, t, half_width=None, origin=0.0):
    """Truncated sinc series ``sum_k samples[k] * sinc((t - origin)/step - k)``.

    Only the ``2*half_width + 1`` sample indices nearest to `t` contribute;
    ``half_width=None`` uses every sample.  `t` may be an array.
    """
    samples = as_sequence(samples, "samples")
    if not step > 0:
        raise InvalidInputError("step must be positive")
    n = samples.size
    if half_width is None:
        half_width = n
    half_width = int(half_width)
    if half_width < 1:
        raise InvalidInputError("half_width must be >= 1")
    u = (np.asarray(t, dtype=float) - origin) / step
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    centre = np.rint(u).astype(np.int64)
    offsets = np.arange(-half_width, half_width + 1)
    idx = centre[:, None] + offsets[None, :]
    valid = (idx >= 0) & (idx < n)
    vals = np.where(valid, samples[np.clip(idx, 0, n - 1)], 0.0)
    out = np.sum(vals * np.sinc(u[:, None] - idx), axis=1)
    return float(out[0]) if scalar else out
