"""Monte-Carlo experiment runners and result export.

Every trial is driven by one integer seed: the signal comes from
``random_bandlimited(seed)``, random parameters from
``default_rng([seed, 1])`` and measurement noise from ``[seed, 2]``.
Trial ``i`` of a run uses seed ``seed0 + i``, so trials are independent
and may be run in any order.
"""

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .adc import ModuloAdcConfig, acquire, add_bounded_noise, quantize, saturate
from .errors import ModsampleError
from .numerics import fold
from .recovery import (
    RecoveryConfig,
    align_constant,
    choose_order,
    itoh_unwrap,
    max_noise_bound,
    recover,
    smallest_grid_bound,
)
from .signals import DEFAULT_NUM_BINS, SamplingGrid, random_bandlimited, sample

SUCCESS_THRESHOLD = 1e-24
DEFAULT_STEP = 11 / 200
LAMBDA_RANGE = (0.01, 0.1)
SAMPLE_MARGIN = 32
MAX_SAMPLES = 100_000

TRIAL_COLUMNS = ["trial", "seed", "lambda", "T", "N", "mse_aligned", "success", "runtime_ms"]
SWEEP_COLUMNS = ["T", "N", "success_rate", "trials"]


class ExportError(OSError):
    pass


def mse(a, b):
    """Mean squared error between two equal-length sequences."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ModsampleError(f"mse needs two equal-length non-empty sequences, got {a.shape} and {b.shape}")
    return float(np.mean((a - b) ** 2))


def _rename_lam(row):
    return {("lambda" if k == "lam" else k): v for k, v in row.items()}


def num_samples(cfg, order):
    """Samples per trial: the minimal window J + N + 2 plus a fixed margin."""
    return cfg.window + order + SAMPLE_MARGIN


@dataclass
class TrialReport:
    trial: int
    seed: int
    lam: float
    T: float
    N_used: int
    mse_aligned: float
    success: bool
    runtime_ms: float = 0.0

    def to_row(self):
        return {
            "trial": self.trial,
            "seed": self.seed,
            "lambda": self.lam,
            "T": self.T,
            "N": self.N_used,
            "mse_aligned": self.mse_aligned,
            "success": self.success,
            "runtime_ms": self.runtime_ms,
        }


@dataclass
class TrialOutcome:
    """Everything produced by one noiseless trial, for inspection in tests."""

    signal: object
    config: RecoveryConfig
    gamma: np.ndarray
    y: np.ndarray
    result: object
    aligned: np.ndarray
    offset: int

    @property
    def mse(self):
        return mse(self.aligned, self.gamma)


def simulate_trial(seed, lam=None, beta_g=None, step=DEFAULT_STEP, order=None,
                   omega=np.pi, amplitude=1.0, num_bins=DEFAULT_NUM_BINS):
    """Draw a signal, fold its samples and recover them.

    `lam` defaults to a U(0.01, 0.1) draw and `beta_g` to the smallest
    multiple of ``2*lam`` that bounds `amplitude`.
    """
    sig = random_bandlimited(seed, num_bins=num_bins, omega=omega)
    if amplitude != 1.0:
        sig = sig.scaled(amplitude)
    if lam is None:
        lam = float(np.random.default_rng([seed, 1]).uniform(*LAMBDA_RANGE))
    if beta_g is None:
        beta_g = smallest_grid_bound(amplitude, lam)
    cfg = RecoveryConfig(omega=omega, step=step, beta_g=beta_g, threshold=lam, order=order)
    n = order if order is not None else choose_order(cfg)
    k = num_samples(cfg, n)
    if k > MAX_SAMPLES:
        raise ModsampleError(f"trial needs {k} samples, above the cap of {MAX_SAMPLES}")
    gamma = sample(sig, SamplingGrid(step, k))
    y = acquire(gamma, ModuloAdcConfig(threshold=lam))
    res = recover(y, cfg)
    aligned, m = align_constant(res.gamma_tilde, gamma, lam)
    return TrialOutcome(sig, cfg, gamma, y, res, aligned, m)


def run_trial(trial, seed, lam=None, beta_g=None, step=DEFAULT_STEP, order=None,
              timing=True):
    start = time.perf_counter()
    try:
        out = simulate_trial(seed, lam=lam, beta_g=beta_g, step=step, order=order)
    except ModsampleError:
        if lam is None:
            lam = float(np.random.default_rng([seed, 1]).uniform(*LAMBDA_RANGE))
        return TrialReport(trial, seed, lam, step, order or 0, math.inf, False,
                           _elapsed(start) if timing else 0.0)
    err = out.mse
    return TrialReport(
        trial=trial,
        seed=seed,
        lam=out.config.threshold,
        T=step,
        N_used=out.result.order_used,
        mse_aligned=err,
        success=err <= SUCCESS_THRESHOLD,
        runtime_ms=_elapsed(start) if timing else 0.0,
    )


def _elapsed(start):
    return (time.perf_counter() - start) * 1e3


def run_noiseless(trials=1000, seed0=0, lam=None, beta_g=None, step=DEFAULT_STEP,
                  order=None, timing=True):
    """Noiseless Monte-Carlo recovery; one :class:`TrialReport` per trial.

    Trials whose configuration is rejected by the recovery are recorded as
    failures (infinite MSE) and the run continues.
    """
    if trials < 1:
        raise ModsampleError("trials must be >= 1")
    return [
        run_trial(i, seed0 + i, lam=lam, beta_g=beta_g, step=step, order=order, timing=timing)
        for i in range(trials)
    ]


@dataclass
class SweepGrid:
    T_values: np.ndarray
    N_values: np.ndarray
    success_rate: np.ndarray
    trials_per_cell: int

    def rows(self):
        for i, t in enumerate(self.T_values):
            for j, n in enumerate(self.N_values):
                yield {
                    "T": float(t),
                    "N": int(n),
                    "success_rate": float(self.success_rate[i, j]),
                    "trials": self.trials_per_cell,
                }

    def rate(self, T, N):
        i = int(np.argmin(np.abs(self.T_values - T)))
        j = list(self.N_values).index(N)
        return float(self.success_rate[i, j])


def default_sweep_steps(spacing=0.01, t_max=1.0):
    count = int(round(t_max / spacing))
    return np.round(spacing * np.arange(1, count + 1), 10)


def run_sharpness_sweep(trials_per_cell=50, seed0=0, lam=0.2, beta_g=None,
                        T_values=None, N_values=range(1, 6), omega=np.pi):
    """Success rate of recovery over a grid of sampling steps and forced orders.

    The same ``trials_per_cell`` signals (seeds ``seed0 + i``) are used in
    every cell.  ``beta_g`` defaults to the grid-rounded bound for unit
    amplitude.  Cells that cannot be run count as failures.
    """
    if trials_per_cell < 1:
        raise ModsampleError("trials_per_cell must be >= 1")
    T_values = default_sweep_steps() if T_values is None else np.asarray(T_values, dtype=float)
    N_values = np.asarray(list(N_values), dtype=int)
    if beta_g is None:
        beta_g = smallest_grid_bound(1.0, lam)
    signals = [random_bandlimited(seed0 + i, omega=omega) for i in range(trials_per_cell)]
    rate = np.zeros((T_values.size, N_values.size))
    for i, T in enumerate(T_values):
        for j, n in enumerate(N_values):
            cfg = RecoveryConfig(omega=omega, step=float(T), beta_g=beta_g, threshold=lam,
                                 order=int(n))
            k = num_samples(cfg, int(n))
            if k > MAX_SAMPLES:
                continue
            grid = SamplingGrid(float(T), k)
            hits = 0
            for sig in signals:
                gamma = sample(sig, grid)
                try:
                    res = recover(fold(gamma, lam), cfg)
                except ModsampleError:
                    continue
                aligned, _ = align_constant(res.gamma_tilde, gamma, lam)
                hits += mse(aligned, gamma) <= SUCCESS_THRESHOLD
            rate[i, j] = hits / trials_per_cell
    return SweepGrid(T_values, N_values, rate, trials_per_cell)


@dataclass
class QuantizationReport:
    seed: int
    lam: float
    T: float
    N: int
    bits: int
    sup_norm: float
    beta_g: float
    num_samples: int
    mse_recovered: float
    mse_measurement: float
    mse_direct: float

    def to_row(self):
        return _rename_lam(asdict(self))


def run_quantization(seed=0, bits=3, lam=1.0, sup_norm=12.5, beta_g=14.0,
                     step=DEFAULT_STEP, order=2):
    """Recovery from B-bit quantized modulo samples vs. direct B-bit quantization.

    The direct baseline is a conventional ADC whose clipping level equals the
    signal peak, quantized with the same number of bits.
    """
    sig = random_bandlimited(seed).scaled(sup_norm)
    cfg = RecoveryConfig(omega=np.pi, step=step, beta_g=beta_g, threshold=lam, order=order)
    n = order if order is not None else choose_order(cfg)
    k = num_samples(cfg, n)
    gamma = sample(sig, SamplingGrid(step, k))
    y = fold(gamma, lam)
    y_q = acquire(gamma, ModuloAdcConfig(threshold=lam, bits=bits))
    res = recover(y_q, cfg)
    aligned, _ = align_constant(res.gamma_tilde, gamma, lam)
    direct = quantize(saturate(gamma, sup_norm), bits, sup_norm)
    return QuantizationReport(
        seed=seed, lam=lam, T=step, N=res.order_used, bits=bits, sup_norm=sup_norm,
        beta_g=beta_g, num_samples=k,
        mse_recovered=mse(aligned, gamma),
        mse_measurement=mse(y_q, y),
        mse_direct=mse(direct, gamma),
    )


@dataclass
class NoiseTrialRecord:
    trial: int
    seed: int
    lam: float
    T: float
    N: int
    noise_bound: float
    max_deviation: float
    violation: bool

    def to_row(self):
        return _rename_lam(asdict(self))


NOISE_COLUMNS = ["trial", "seed", "lambda", "T", "N", "noise_bound", "max_deviation", "violation"]


@dataclass
class NoiseTheoremReport:
    alpha: int
    trials: int
    tolerance: float
    noise_scale: float
    records: list = field(default_factory=list)

    @property
    def violations(self):
        return sum(r.violation for r in self.records)

    @property
    def max_deviation(self):
        return max((r.max_deviation for r in self.records), default=0.0)


def run_noise_theorem(alpha=1, trials=100, seed0=0, lam=None, beta_g=None, step=None,
                      order=None, noise_scale=1.0, tol=1e-9, omega=np.pi):
    """Check that noisy recovery returns ``gamma + eta`` up to a 2*lambda offset.

    Uses ``T = 1/(2**alpha * omega * e)`` and noise uniform on ``[-b0, b0]``
    with ``b0`` the admissible bound times `noise_scale`.  A trial counts as a
    violation when ``max|aligned - gamma - eta| > tol``; violations are
    recorded, not raised.
    """
    if int(alpha) < 1:
        raise ModsampleError("alpha must be >= 1")
    if step is None:
        step = 1.0 / (2**alpha * omega * math.e)
    report = NoiseTheoremReport(alpha=alpha, trials=trials, tolerance=tol, noise_scale=noise_scale)
    for i in range(trials):
        seed = seed0 + i
        lam_i = lam if lam is not None else float(
            np.random.default_rng([seed, 1]).uniform(*LAMBDA_RANGE))
        beta_i = beta_g if beta_g is not None else smallest_grid_bound(1.0, lam_i)
        cfg = RecoveryConfig(omega=omega, step=step, beta_g=beta_i, threshold=lam_i,
                             order=order, alpha=alpha)
        n = order if order is not None else choose_order(cfg)
        b0 = noise_scale * max_noise_bound(lam_i, cfg.dynamic_range, alpha)
        sig = random_bandlimited(seed, omega=omega)
        gamma = sample(sig, SamplingGrid(step, num_samples(cfg, n)))
        y = fold(gamma, lam_i)
        y_eta = add_bounded_noise(y, b0, [seed, 2])
        try:
            res = recover(y_eta, cfg)
            aligned, _ = align_constant(res.gamma_tilde, gamma, lam_i)
            dev = float(np.max(np.abs(aligned - gamma - (y_eta - y))))
        except ModsampleError:
            dev = math.inf
        report.records.append(NoiseTrialRecord(i, seed, lam_i, step, n, b0, dev, dev > tol))
    return report


@dataclass
class ItohReport:
    seed: int
    lam: float
    T: float
    N: int
    beta_g: float
    amplitude: float
    max_first_difference: float
    folds: int
    mse_recover: float
    mse_itoh: float

    def to_row(self):
        return _rename_lam(asdict(self))


def run_itoh_comparison(seed=0, lam=809 / 3125, amplitude=5.0, beta_g=None,
                        step=DEFAULT_STEP, order=None):
    """Compare full recovery with first-order unwrapping on a strongly folded signal."""
    if beta_g is None:
        beta_g = smallest_grid_bound(amplitude, lam)
    out = simulate_trial(seed, lam=lam, beta_g=beta_g, step=step, order=order,
                         amplitude=amplitude)
    unwrapped, _ = align_constant(itoh_unwrap(out.y, lam), out.gamma, lam)
    return ItohReport(
        seed=seed, lam=lam, T=step, N=out.result.order_used, beta_g=beta_g,
        amplitude=amplitude,
        max_first_difference=float(np.max(np.abs(np.diff(out.gamma)))),
        folds=int(np.count_nonzero(out.gamma != out.y)),
        mse_recover=out.mse,
        mse_itoh=mse(unwrapped, out.gamma),
    )


def _report_table(report):
    """Return (columns, rows, json_body) for any supported report."""
    if isinstance(report, SweepGrid):
        rows = list(report.rows())
        return SWEEP_COLUMNS, rows, {"cells": rows}
    if isinstance(report, NoiseTheoremReport):
        rows = [r.to_row() for r in report.records]
        summary = {
            "alpha": report.alpha,
            "trials": report.trials,
            "tolerance": report.tolerance,
            "noise_scale": report.noise_scale,
            "violations": report.violations,
            "max_deviation": report.max_deviation,
        }
        return NOISE_COLUMNS, rows, {"summary": summary, "trials": rows}
    if isinstance(report, (QuantizationReport, ItohReport)):
        row = report.to_row()
        return list(row), [row], {"report": row}
    if isinstance(report, (list, tuple)) and all(isinstance(r, TrialReport) for r in report):
        rows = [r.to_row() for r in report]
        return TRIAL_COLUMNS, rows, {"trials": rows}
    raise TypeError(f"cannot export {type(report).__name__}")


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not JSON serializable: {type(v).__name__}")


def render(report, fmt="csv", config=None):
    """Serialize a report to a CSV or JSON string."""
    columns, rows, body = _report_table(report)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "json":
        cfg = dict(config or {})
        cfg.setdefault("version", __version__)
        return json.dumps({"config": cfg, **body}, indent=2, default=_jsonable) + "\n"
    raise ValueError(f"unknown format {fmt!r}; use 'csv' or 'json'")


def export(report, fmt, path, config=None):
    """Write `report` to `path` as CSV or JSON."""
    text = render(report, fmt, config)
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_trials_csv(path):
    """Load a trial-report CSV written by :func:`export`."""
    with open(path, newline="") as fh:
        return [
            TrialReport(
                trial=int(r["trial"]), seed=int(r["seed"]), lam=float(r["lambda"]),
                T=float(r["T"]), N_used=int(r["N"]), mse_aligned=float(r["mse_aligned"]),
                success=r["success"] == "True", runtime_ms=float(r["runtime_ms"]),
            )
            for r in csv.DictReader(fh)
        ]
