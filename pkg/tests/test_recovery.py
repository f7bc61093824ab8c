import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modsample import (
    ConfigError,
    GridError,
    InvalidInputError,
    OversamplingError,
    RecoveryConfig,
    SamplingGrid,
    WindowTooShortError,
    align_constant,
    choose_order,
    estimate_kappa,
    finite_difference,
    fold,
    itoh_unwrap,
    max_noise_bound,
    random_bandlimited,
    recover,
    sample,
    smallest_grid_bound,
)
from modsample.harness import simulate_trial

E = math.e


def cfg_for(rho, lam, beta_g, alpha=None, order=None, omega=np.pi):
    return RecoveryConfig(omega=omega, step=rho / (omega * E), beta_g=beta_g, threshold=lam,
                          alpha=alpha, order=order)


def brute_order(rho, beta, target):
    n = 1
    while rho**n * beta > target:
        n += 1
    return n


@pytest.mark.parametrize(
    "lam, beta_g, alpha, expected",
    [(1.0, 4.0, None, 2), (1.0, 10.0, None, 4), (1.0, 4.0, 1, 3),
     (1.0, 2.0, None, 1)],
)
def test_choose_order_examples(lam, beta_g, alpha, expected):
    assert choose_order(cfg_for(0.5, lam, beta_g, alpha)) == expected


@given(
    st.floats(0.01, 0.99),
    st.floats(0.01, 10.0),
    st.integers(1, 200),
    st.sampled_from([None, 1, 2]),
)
def test_choose_order_is_smallest(rho, lam, m, alpha):
    beta = 2 * lam * m
    target = lam if alpha is None else lam / 2
    expected = brute_order(rho, beta, target * (1 + 1e-12))
    assert choose_order(cfg_for(rho, lam, beta, alpha)) == expected


def test_choose_order_rejects_slow_sampling():
    with pytest.raises(OversamplingError):
        choose_order(cfg_for(1.0, 1.0, 4.0))
    with pytest.raises(OversamplingError):
        choose_order(RecoveryConfig(omega=np.pi, step=0.2, beta_g=4.0, threshold=1.0))


def test_config_validation():
    with pytest.raises(GridError):
        RecoveryConfig(omega=np.pi, step=0.05, beta_g=3.0, threshold=1.0)
    with pytest.raises(GridError):
        RecoveryConfig(omega=np.pi, step=0.05, beta_g=1.0, threshold=1.0)
    with pytest.raises(ConfigError):
        RecoveryConfig(omega=np.pi, step=-0.05, beta_g=2.0, threshold=1.0)
    with pytest.raises(ConfigError):
        RecoveryConfig(omega=np.pi, step=0.05, beta_g=2.0, threshold=1.0, order=0)
    cfg = RecoveryConfig(omega=np.pi, step=0.05, beta_g=6.0, threshold=1.0)
    assert cfg.window == 36
    assert cfg.dynamic_range == 6.0
    assert cfg.guaranteed()
    assert not RecoveryConfig(omega=np.pi, step=0.05, beta_g=6.0, threshold=1.0, alpha=2).guaranteed()


def test_smallest_grid_bound():
    assert smallest_grid_bound(1.0, 0.2) == pytest.approx(1.2)
    assert smallest_grid_bound(1.0, 1.0) == 2.0
    assert smallest_grid_bound(5.0, 1.0) == 6.0
    assert smallest_grid_bound(4.0, 1.0) == 4.0


@pytest.mark.parametrize(
    "dr, alpha, expected", [(8, 1, 0.015625), (8, 4, 0.125)],
)
def test_max_noise_bound_examples(dr, alpha, expected):
    assert max_noise_bound(1.0, dr, alpha) == pytest.approx(expected, rel=1e-15)


def test_max_noise_bound_limit():
    vals = [max_noise_bound(1.0, 8, a) for a in (1, 2, 4, 16, 256)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.25 and vals[-1] > 0.24
    with pytest.raises(ConfigError):
        max_noise_bound(1.0, 0.5, 1)


def test_estimate_kappa_examples():
    beta, j = 4.0, 24
    zeta = np.zeros(j + 1)
    assert estimate_kappa(zeta, beta, j) == 0
    zeta[0] = 12 * beta
    assert estimate_kappa(zeta, beta, j) == 1
    zeta[0] = -12 * beta
    assert estimate_kappa(zeta, beta, j) == -1
    with pytest.raises(WindowTooShortError) as exc:
        estimate_kappa(np.zeros(j), beta, j)
    assert exc.value.required == j + 1


def test_never_folding_signal():
    lam = 2.0
    sig = random_bandlimited(4)
    cfg = RecoveryConfig(omega=np.pi, step=0.05, beta_g=4.0, threshold=lam)
    gamma = sample(sig, SamplingGrid(0.05, cfg.window + 40))
    res = recover(fold(gamma, lam), cfg)
    assert np.unique(res.residual_units).size == 1
    aligned, _ = align_constant(res.gamma_tilde, gamma, lam)
    np.testing.assert_array_equal(aligned, gamma)


def test_recover_window_too_short():
    cfg = RecoveryConfig(omega=np.pi, step=0.05, beta_g=1.2, threshold=0.2)
    n = choose_order(cfg)
    need = cfg.window + n + 2
    with pytest.raises(WindowTooShortError) as exc:
        recover(np.zeros(need - 1), cfg)
    assert exc.value.required == need
    recover(np.zeros(need), cfg)


def true_kappas(gamma, lam, order):
    """(Delta^{n-1} eps)[0] / 2lam for n = N..2, which is what each loop round must add."""
    eps = gamma - fold(gamma, lam)
    out = []
    for n in range(order, 1, -1):
        out.append(int(np.rint(finite_difference(eps, n - 1)[0] / (2 * lam))))
    return out


@given(st.integers(0, 10**6), st.sampled_from([None, 3, 4, 5]))
@settings(max_examples=40, deadline=None)
def test_recovery_matches_residual_oracle(seed, order):
    out = simulate_trial(seed, order=order)
    lam = out.config.threshold
    eps_units = np.rint((out.gamma - out.y) / (2 * lam)).astype(np.int64)
    np.testing.assert_array_equal(out.result.residual_units + out.offset, eps_units)
    assert out.result.kappas == true_kappas(out.gamma, lam, out.result.order_used)
    assert len(out.result.kappas) == out.result.order_used - 1
    tol = 64 * np.finfo(float).eps * np.max(np.abs(out.gamma))
    assert np.max(np.abs(out.aligned - out.gamma)) <= tol


def test_constants_are_nontrivial_somewhere():
    ks = [k for s in range(30) for k in simulate_trial(s).result.kappas]
    assert any(k != 0 for k in ks)


def test_synthetic_staircase():
    # eps on the 2lam grid whose differences need genuine constant estimates
    lam = 0.25
    t = np.arange(400) * 0.02
    gamma = 1.8 * np.sin(0.9 * t + 0.3) + 0.4 * np.cos(2.1 * t)
    cfg = RecoveryConfig(omega=2.1, step=0.02, beta_g=2.5, threshold=lam)
    res = recover(fold(gamma, lam), cfg)
    assert res.kappas == true_kappas(gamma, lam, res.order_used)
    aligned, _ = align_constant(res.gamma_tilde, gamma, lam)
    np.testing.assert_allclose(aligned, gamma, atol=1e-13)


def test_itoh_examples():
    y = fold(np.array([0.0, 0.5, 1.2]), 1.0)
    np.testing.assert_allclose(y, [0.0, 0.5, -0.8])
    np.testing.assert_allclose(itoh_unwrap(y, 1.0), [0.0, 0.5, 1.2])
    np.testing.assert_array_equal(itoh_unwrap(np.full(5, 0.3), 1.0), np.full(5, 0.3))
    np.testing.assert_array_equal(itoh_unwrap([0.7], 1.0), [0.7])


def test_itoh_fails_on_large_jumps():
    gamma = np.array([0.0, 1.5, 3.0, 4.5])
    assert not np.allclose(itoh_unwrap(fold(gamma, 1.0), 1.0), gamma)


def test_align_constant():
    a = np.linspace(-1, 1, 11)
    assert align_constant(a, a, 0.5)[1] == 0
    shifted, m = align_constant(a, a + 2 * 0.5 * 3, 0.5)
    assert m == 3
    np.testing.assert_allclose(shifted, a + 3.0)
    noise = np.random.default_rng(0).uniform(-0.2, 0.2, a.size)
    assert align_constant(a + noise, a + 3.0, 0.5)[1] == 3
    with pytest.raises(InvalidInputError):
        align_constant(a, a[:-1], 0.5)
