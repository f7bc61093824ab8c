"""Elementary sequence operators: centered modulo, finite differences,
running sums and rounding onto the 2*lambda grid.

Sequences are plain 1-D numpy float arrays.  When an operation needs a
semantic index, element 0 of the array is index 1.
"""

import numpy as np

from .errors import InsufficientLengthError, InvalidInputError


def _check_threshold(threshold):
    lam = float(threshold)
    if not np.isfinite(lam) or lam <= 0:
        raise InvalidInputError(f"threshold must be a positive finite number, got {threshold!r}")
    return lam


def _as_finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def as_sequence(s, name="sequence"):
    """Validate and convert `s` to a non-empty, finite 1-D float array."""
    arr = _as_finite(s, name)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} is empty")
    return arr


def fold(x, threshold):
    """Centered modulo map onto ``[-threshold, threshold)``.

    Computes ``2*lam*(frac(x/(2*lam) + 1/2) - 1/2)`` in the algebraically
    equivalent form ``x - 2*lam*floor((x + lam)/(2*lam))``, which leaves
    in-range inputs bit-for-bit unchanged.

    Parameters
    ----------
    x : float or array_like
        Amplitudes to fold.  Must be finite.
    threshold : float
        Folding threshold ``lam > 0``.

    Returns
    -------
    float or numpy.ndarray
        Folded amplitudes, same shape as `x`.
    """
    lam = _check_threshold(threshold)
    arr = _as_finite(x)
    period = 2.0 * lam
    wraps = np.floor((arr + lam) / period)
    out = arr - period * wraps
    # floor() of a rounded quotient can be off by one right at the edges
    out = np.where(out >= lam, out - period, out)
    out = np.where(out < -lam, out + period, out)
    if out.ndim == 0:
        return float(out)
    return out


def fold_sequence(s, threshold):
    """Element-wise :func:`fold` of a sequence."""
    return fold(as_sequence(s), threshold)


def finite_difference(s, order=1):
    """N-th order forward difference, ``(D s)[k] = s[k+1] - s[k]`` applied `order` times.

    Works along the last axis, so a 2-D array is treated as a batch of
    sequences.  The result is ``order`` elements shorter than the input.
    """
    arr = _as_finite(s, "sequence")
    order = int(order)
    if order < 1:
        raise InvalidInputError(f"order must be a positive integer, got {order}")
    if arr.ndim == 0 or arr.shape[-1] <= order:
        n = 0 if arr.ndim == 0 else arr.shape[-1]
        raise InsufficientLengthError(
            f"difference of order {order} needs more than {order} samples, got {n}"
        )
    return np.diff(arr, n=order, axis=-1)


def anti_difference(s):
    """Running sum ``(S s)[k] = s[1] + ... + s[k]``, same length as `s`.

    ``anti_difference(finite_difference(a))[k] == a[k+1] - a[1]``.
    """
    arr = _as_finite(s, "sequence")
    if arr.ndim == 0 or arr.shape[-1] == 0:
        raise InvalidInputError("sequence is empty")
    return np.cumsum(arr, axis=-1)


def integrate(s):
    """Running sum with a leading zero: the exact inverse of a first difference
    up to the starting value, ``integrate(finite_difference(a)) == a - a[0]``.

    One element longer than `s`.
    """
    cs = anti_difference(s)
    pad = np.zeros(cs.shape[:-1] + (1,))
    return np.concatenate([pad, cs], axis=-1)


def grid_index(x, threshold):
    """Integer ``m`` such that ``2*lam*m`` is the nearest point of the 2*lam grid.

    Uses ``ceil(floor(x/lam)/2)``, so ``[2m-1, 2m+1)*lam`` maps to ``m``.
    """
    lam = _check_threshold(threshold)
    arr = _as_finite(x)
    idx = np.ceil(np.floor(arr / lam) / 2.0).astype(np.int64)
    if idx.ndim == 0:
        return int(idx)
    return idx


def round_to_2lambda_grid(x, threshold):
    """Round to the nearest multiple of ``2*threshold``; ``|result - x| <= threshold``."""
    lam = _check_threshold(threshold)
    return 2.0 * lam * grid_index(x, lam)
