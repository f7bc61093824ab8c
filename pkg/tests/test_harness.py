import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from modsample import ModsampleError
from modsample.harness import (
    SUCCESS_THRESHOLD,
    TRIAL_COLUMNS,
    ExportError,
    export,
    mse,
    read_trials_csv,
    render,
    run_itoh_comparison,
    run_noise_theorem,
    run_noiseless,
    run_quantization,
    run_sharpness_sweep,
    run_trial,
)


@given(arrays(float, st.integers(1, 200), elements=st.floats(-1e3, 1e3)),
       arrays(float, 200, elements=st.floats(-1e3, 1e3)))
def test_mse_matches_fsum(a, b):
    b = b[: a.size]
    oracle = math.fsum((x - y) ** 2 for x, y in zip(a, b)) / a.size
    assert mse(a, b) == pytest.approx(oracle, rel=1e-12, abs=1e-300)


def test_mse_rejects_bad_shapes():
    with pytest.raises(ModsampleError):
        mse([1.0, 2.0], [1.0])
    with pytest.raises(ModsampleError):
        mse([], [])


def test_noiseless_small_run():
    reps = run_noiseless(trials=20, seed0=100)
    assert [r.trial for r in reps] == list(range(20))
    assert [r.seed for r in reps] == list(range(100, 120))
    assert all(r.success and r.mse_aligned <= SUCCESS_THRESHOLD for r in reps)
    assert all(0.01 <= r.lam <= 0.1 for r in reps)


def test_trials_are_order_independent():
    batch = run_noiseless(trials=8, seed0=5, timing=False)
    single = [run_trial(i, 5 + i, timing=False) for i in reversed(range(8))][::-1]
    assert batch == single


def test_bad_config_is_recorded_as_failure():
    reps = run_noiseless(trials=3, lam=0.1, beta_g=0.3, timing=False)
    assert all(not r.success and math.isinf(r.mse_aligned) for r in reps)


def test_sweep_shape_and_extremes():
    grid = run_sharpness_sweep(trials_per_cell=5, T_values=[0.05, 0.6], N_values=[1, 2, 3])
    assert grid.success_rate.shape == (2, 3)
    assert grid.rate(0.05, 3) == 1.0
    assert np.all(grid.success_rate[1] == 0.0)
    rows = list(grid.rows())
    assert len(rows) == 6 and rows[0] == {"T": 0.05, "N": 1, "success_rate": grid.rate(0.05, 1),
                                          "trials": 5}


def test_quantization_report_consistency():
    r = run_quantization()
    assert r.N == 2 and r.bits == 3
    assert r.mse_recovered == pytest.approx(r.mse_measurement, rel=1e-12)
    assert r.mse_direct > 10 * r.mse_recovered


def test_noise_theorem_small():
    rep = run_noise_theorem(alpha=2, trials=10)
    assert rep.violations == 0
    assert rep.max_deviation < 1e-12
    # far too much noise breaks recovery, and that is recorded rather than raised
    loud = run_noise_theorem(alpha=1, trials=10, noise_scale=40.0)
    assert loud.violations > 0


def test_itoh_report():
    r = run_itoh_comparison()
    assert r.max_first_difference > r.lam
    assert r.folds > 0
    assert r.mse_recover < 1e-24 < r.mse_itoh


def test_csv_round_trip(tmp_path):
    reps = run_noiseless(trials=5, timing=False)
    path = tmp_path / "t.csv"
    export(reps, "csv", path)
    back = read_trials_csv(path)
    assert [b.to_row() for b in back] == [r.to_row() for r in reps]
    with open(path, newline="") as fh:
        assert next(csv.reader(fh)) == TRIAL_COLUMNS


def test_empty_report_is_header_only():
    assert render([], "csv") == ",".join(TRIAL_COLUMNS) + "\n"


def test_json_has_config_and_version():
    reps = run_noiseless(trials=2, timing=False)
    doc = json.loads(render(reps, "json", {"lambda": 0.05}))
    assert doc["config"]["lambda"] == 0.05
    assert "version" in doc["config"]
    assert len(doc["trials"]) == 2
    assert set(doc["trials"][0]) == set(TRIAL_COLUMNS)


def test_exports_are_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export(run_noiseless(trials=6, timing=False), "csv", a)
    export(run_noiseless(trials=6, timing=False), "csv", b)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("report", [run_quantization(), run_noise_theorem(trials=2)])
def test_other_reports_render(report):
    for fmt in ("csv", "json"):
        assert render(report, fmt)


def test_export_errors(tmp_path):
    with pytest.raises(ExportError) as exc:
        export([], "csv", tmp_path / "missing" / "x.csv")
    assert "missing" in str(exc.value)
    with pytest.raises(ValueError):
        render([], "xml")
    with pytest.raises(TypeError):
        render(object(), "csv")
