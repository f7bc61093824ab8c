"""Recovery of bandlimited samples from (noisy) modulo samples.

The method takes N-th order differences of the folded samples, where
folding no longer changes anything for a sufficiently oversampled signal.
That exposes the N-th difference of the residual ``gamma - y``, which lives
on the 2*lambda grid.  The residual is then rebuilt by N rounds of
summation; each round (except the last) fixes its unknown integration
constant from how fast the next sum drifts over a window of J samples.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, GridError, InvalidInputError, OversamplingError, WindowTooShortError
from .numerics import as_sequence, finite_difference, fold, grid_index, integrate

# relative slack when checking that beta_g / (2*lambda) is an integer
_GRID_RTOL = 1e-9


@dataclass(frozen=True)
class RecoveryConfig:
    """Parameters of a recovery run.

    Attributes
    ----------
    omega : float
        Bandwidth in rad/s.
    step : float
        Sampling step T in seconds.
    beta_g : float
        Known amplitude bound; must be a positive multiple of ``2*threshold``.
    threshold : float
        ADC folding threshold lambda.
    order : int, optional
        Difference order N.  ``None`` selects it with :func:`choose_order`.
    alpha : int, optional
        ``None`` for noiseless operation; otherwise the noise exponent, which
        switches the order rule to the one with an extra factor 2 of margin.
    """

    omega: float
    step: float
    beta_g: float
    threshold: float
    order: Optional[int] = None
    alpha: Optional[int] = None

    def __post_init__(self):
        for name in ("omega", "step", "beta_g", "threshold"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive and finite, got {v}")
        if self.order is not None and int(self.order) < 1:
            raise ConfigError(f"order must be >= 1, got {self.order}")
        if self.alpha is not None and int(self.alpha) < 1:
            raise ConfigError(f"alpha must be >= 1, got {self.alpha}")
        grid_multiple(self.beta_g, self.threshold)

    @property
    def rate_factor(self):
        """``T * Omega * e``; differences shrink by this factor per order."""
        return self.step * self.omega * math.e

    @property
    def dynamic_range(self):
        return self.beta_g / self.threshold

    @property
    def window(self):
        """J = 6*beta_g/lambda, the drift window used to resolve constants."""
        return 12 * grid_multiple(self.beta_g, self.threshold)

    def guaranteed(self):
        """True if the sampling step meets the sufficient condition for exact
        (noiseless) or noise-tracking (noisy) recovery."""
        alpha = 1 if self.alpha is None else int(self.alpha)
        return self.step <= 1.0 / (2**alpha * self.omega * math.e)


@dataclass
class RecoveryResult:
    """Output of :func:`recover`.

    ``gamma_tilde`` equals the true samples plus an unknown multiple of
    ``2*threshold`` (plus the measurement noise, in the noisy case).
    ``residual_units`` holds the residual as exact integers in units of
    ``2*threshold``.
    """

    gamma_tilde: np.ndarray
    residual: np.ndarray
    residual_units: np.ndarray
    kappas: list
    order_used: int
    j_used: int
    threshold: float = field(repr=False, default=1.0)


def grid_multiple(beta_g, threshold):
    """Return the positive integer ``beta_g / (2*threshold)`` or raise GridError."""
    ratio = beta_g / (2.0 * threshold)
    m = round(ratio)
    if m < 1 or abs(ratio - m) > _GRID_RTOL * max(1.0, ratio):
        raise GridError(
            f"beta_g={beta_g} is not a positive multiple of 2*lambda={2 * threshold}"
        )
    return int(m)


def smallest_grid_bound(amplitude, threshold):
    """Smallest element of ``2*threshold*Z`` that is ``>= amplitude`` (and > 0)."""
    m = max(1, math.ceil(amplitude / (2.0 * threshold)))
    return 2.0 * threshold * m


def choose_order(cfg):
    """Smallest N with ``(T*Omega*e)**N * beta_g <= target``.

    The target is ``lambda`` in noiseless mode and ``lambda/2`` in noisy mode.
    Returns at least 1.
    """
    rho = cfg.rate_factor
    if rho >= 1:
        raise OversamplingError(
            f"T*Omega*e = {rho:.4g} >= 1; sample faster (T <= 1/(2*Omega*e) is sufficient)"
        )
    lam, beta = cfg.threshold, cfg.beta_g
    target = lam if cfg.alpha is None else lam / 2.0
    if beta <= target:
        return 1
    ratio = (math.log(target) - math.log(beta)) / math.log(rho)
    n = max(1, math.ceil(ratio - 1e-9))
    # guard against log round-off on either side of an integer
    while n > 1 and rho ** (n - 1) * beta <= target * (1 + 1e-12):
        n -= 1
    while rho**n * beta > target * (1 + 1e-12):
        n += 1
    return n


def max_noise_bound(threshold, dr, alpha):
    """Largest admissible sup-norm of the noise, ``(lambda/4) * (2*DR)**(-1/alpha)``."""
    if dr < 1:
        raise ConfigError(f"dynamic range must be >= 1, got {dr}")
    if int(alpha) < 1:
        raise ConfigError(f"alpha must be >= 1, got {alpha}")
    return threshold / 4.0 * (2.0 * dr) ** (-1.0 / int(alpha))


def estimate_kappa(zeta, beta_g, j):
    """Integration constant, in units of 2*lambda, from the drift of `zeta`.

    ``floor((zeta[1] - zeta[J+1]) / (12*beta_g) + 1/2)`` with 1-based indices.
    """
    zeta = np.asarray(zeta, dtype=float)
    j = int(j)
    if zeta.ndim != 1 or zeta.size < j + 1:
        raise WindowTooShortError(j + 1, zeta.size if zeta.ndim == 1 else 0)
    return int(math.floor((zeta[0] - zeta[j]) / (12.0 * beta_g) + 0.5))


def min_samples(order, j):
    return j + order + 2


def recover(y, cfg):
    """Recover samples from modulo samples `y`.

    Every sum below is a running sum with a leading zero, so each summation
    gives back the sample dropped by the corresponding difference and the
    output has the same length as `y`.  The global offset ``2*m*lambda`` is
    left unresolved (m = 0).
    """
    y = as_sequence(y, "y")
    lam = cfg.threshold
    two_lam = 2.0 * lam
    order = int(cfg.order) if cfg.order is not None else choose_order(cfg)
    j = cfg.window
    if order >= 2 and y.size < min_samples(order, j):
        raise WindowTooShortError(min_samples(order, j), y.size)
    if y.size <= order:
        raise WindowTooShortError(order + 1, y.size)

    d = finite_difference(y, order)
    s = fold(d, lam) - d

    kappas = []
    for _ in range(order - 1):
        units = grid_index(integrate(s), lam)
        zeta = two_lam * integrate(units.astype(float))
        kappa = estimate_kappa(zeta, cfg.beta_g, j)
        kappas.append(kappa)
        s = two_lam * (units + kappa).astype(float)

    residual_units = grid_index(integrate(s), lam)
    residual = two_lam * residual_units
    return RecoveryResult(
        gamma_tilde=residual + y,
        residual=residual,
        residual_units=residual_units,
        kappas=kappas,
        order_used=order,
        j_used=j,
        threshold=lam,
    )


def itoh_unwrap(y, threshold):
    """First-order unwrapping: accumulate folded first differences from ``y[0]``.

    Exact (up to the starting value) whenever every ``|gamma[k+1] - gamma[k]|``
    is below the threshold.
    """
    y = as_sequence(y, "y")
    if y.size == 1:
        return y.copy()
    return y[0] + integrate(fold(np.diff(y), threshold))


def align_constant(gamma_tilde, reference, threshold):
    """Shift `gamma_tilde` by the multiple of ``2*threshold`` that best matches
    `reference` on average.  Returns ``(shifted, m)``."""
    gamma_tilde = as_sequence(gamma_tilde, "gamma_tilde")
    reference = as_sequence(reference, "reference")
    if gamma_tilde.size != reference.size:
        raise InvalidInputError(
            f"length mismatch: {gamma_tilde.size} vs {reference.size}"
        )
    m = int(np.rint(np.mean(reference - gamma_tilde) / (2.0 * threshold)))
    return gamma_tilde + 2.0 * threshold * m, m
