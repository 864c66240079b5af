import numpy as np
import pytest

from freqgc import (
    FrequencyGrid,
    InvalidSpec,
    NonPosDefSigma,
    VarFit,
    VarModel,
    fit_ols,
    gc_spectral_classic,
    gc_spectral_ss,
    normalize_innovations,
    simulate,
    transfer_function,
    var_to_ss,
)
from freqgc.spectral import spectrum_from_factor
from freqgc.var import random_stable_var


def injected(model, channels):
    """A VarFit carrying true parameters instead of estimates."""
    return VarFit(model, tuple(channels), np.zeros((0, model.n)))


def test_normalize_diagonal_is_identity(fig1_model, grid):
    H = transfer_function(fig1_model, grid)
    Ht, st = normalize_innovations(H, fig1_model.sigma, 1)
    np.testing.assert_array_equal(Ht.values, H.values)
    np.testing.assert_array_equal(st, fig1_model.sigma)


def test_normalize_schur_complement(grid):
    m = VarModel(np.zeros((1, 2, 2)), [[1.0, 0.5], [0.5, 1.0]], 120.0)
    _, st = normalize_innovations(transfer_function(m, grid), m.sigma, 0)
    np.testing.assert_allclose(np.diag(st), [1.0, 0.75])
    assert st[0, 1] == 0 and st[1, 0] == 0


def test_normalize_preserves_cpsd(rng):
    grid = FrequencyGrid(1.0, 256)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        m = random_stable_var(rng, n, 2)
        H = transfer_function(m, grid)
        target = int(rng.integers(0, n))
        Ht, st = normalize_innovations(H, m.sigma, target)
        assert np.abs(np.delete(st[target], target)).max() == 0
        S = spectrum_from_factor(H, m.sigma).values
        St = spectrum_from_factor(Ht, st).values
        assert np.abs(S - St).max() < 1e-12 * max(1.0, np.abs(S).max())


def test_normalize_rejects_indefinite(grid):
    H = transfer_function(VarModel(np.zeros((1, 2, 2)), np.eye(2), 120.0), grid)
    with pytest.raises(NonPosDefSigma):
        normalize_innovations(H, [[1.0, 2.0], [2.0, 1.0]], 0)


def test_independent_system_true_parameters(grid):
    coeffs = np.zeros((2, 3, 3))
    coeffs[0] = np.diag([0.5, -0.2, 0.7])
    coeffs[1] = np.diag([-0.3, 0.1, 0.0])
    sigma = np.diag([1.0, 2.0, 0.5])
    full = injected(VarModel(coeffs, sigma, 120.0), (0, 1, 2))
    red = injected(VarModel(coeffs[:, [1, 2]][:, :, [1, 2]], sigma[1:, 1:], 120.0), (1, 2))
    f = gc_spectral_classic(full, red, grid, 1, [0], [2])
    assert np.abs(f.values).max() < 1e-10
    assert f.nan_count == 0


def white_transmitter_system(rng, fs=120.0):
    """Bivariate 0 -> 1 system whose transmitter is white noise, coupled at one lag.

    The receiver alone is then an exact AR process with the receiver's own
    coefficients, driven by the white sum ``gain * e0(t - lag) + e1(t)``.
    """
    p = int(rng.integers(1, 4))
    own = random_stable_var(rng, 1, p).coeffs[:, 0, 0]
    lag = int(rng.integers(1, p + 1))
    gain = rng.uniform(-1.0, 1.0)
    s0, s1 = rng.uniform(0.5, 2.0, 2)
    coeffs = np.zeros((p, 2, 2))
    coeffs[:, 1, 1] = own
    coeffs[lag - 1, 1, 0] = gain
    full = VarModel(coeffs, np.diag([s0, s1]), fs)
    red = VarModel(own[:, None, None], [[s1 + gain ** 2 * s0]], fs)
    return full, red


def test_agreement_on_finite_order_reduced_process(rng, grid):
    for _ in range(20):
        full, red = white_transmitter_system(rng)
        classic = gc_spectral_classic(injected(full, (0, 1)), injected(red, (1,)), grid, 1, [0])
        ss = gc_spectral_ss(var_to_ss(full), grid, 1, [0])
        assert np.abs(classic.values - ss.values).max() < 1e-8


def test_singular_reduced_model_gives_nan(grid):
    full = VarModel(np.array([[[0.5, 0.0], [0.3, 0.2]]]), np.eye(2), 120.0)
    red = VarModel([[[1.0]]], [[1.0]], 120.0)  # unit root at f = 0
    f = gc_spectral_classic(injected(full, (0, 1)), injected(red, (1,)), grid, 1, [0])
    assert np.isnan(f.values[0])
    assert f.nan_count == 1
    assert np.isfinite(f.values[1:]).all()


def test_classic_is_not_clamped(fig1_model, grid):
    # short data at high order: the raw estimator goes negative at some bins
    negatives = 0
    for seed in range(10):
        data = simulate(fig1_model, 200, seed=seed)
        f = gc_spectral_classic(fit_ols(data, 20), fit_ols(data, 20, [0, 1]), grid, 0, [2], [1])
        negatives += int(np.sum(f.values < -1e-10))
    assert negatives > 0


def test_channel_checks(fig1_model, grid):
    data = simulate(fig1_model, 500, seed=0)
    full, red = fit_ols(data, 3), fit_ols(data, 3, [1, 2])
    with pytest.raises(InvalidSpec):
        gc_spectral_classic(full, red, grid, 1, [0], [])
    with pytest.raises(InvalidSpec):
        gc_spectral_classic(fit_ols(data, 3, [0, 1]), red, grid, 1, [0], [2])
    with pytest.raises(InvalidSpec):
        gc_spectral_classic(full, red, grid, 1, [1], [2])


def test_estimated_fits_map_original_indices(fig1_model, grid):
    data = simulate(fig1_model, 4000, seed=1)
    full = fit_ols(data, 3, [0, 2])
    red = fit_ols(data, 3, [2])
    f = gc_spectral_classic(full, red, grid, 2, [0])
    assert f.target == 2 and f.sources == (0,) and f.label == "1to3"
    assert np.isfinite(f.values).all()
