import itertools

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from freqgc import (
    FrequencyGrid,
    InvalidSpec,
    NoConvergence,
    NonDiagonalSigma,
    StateSpaceModel,
    VarModel,
    cpsd,
    dare_solve,
    directed_coherence,
    gc_spectral_ss,
    gc_time,
    reduce,
    ss_cpsd,
    ss_transfer,
    transfer_function,
    var_to_ss,
)
from freqgc.var import random_stable_var

FIG1_DIRS = {"1to2": (1, [0], [2]), "2to3": (2, [1], [0]), "3to1": (0, [2], [1])}


def test_var_to_ss_ar1():
    ss = var_to_ss(VarModel([[[0.9]]], [[1.0]]))
    assert ss.m == 1 and ss.n == 1
    np.testing.assert_array_equal(ss.A, [[0.9]])
    np.testing.assert_array_equal(ss.C, [[0.9]])
    np.testing.assert_array_equal(ss.K, [[1.0]])


def test_var_to_ss_layout(fig1_model):
    ss = var_to_ss(fig1_model)
    assert ss.m == 9
    np.testing.assert_array_equal(ss.C, np.concatenate(list(fig1_model.coeffs), axis=1))
    np.testing.assert_array_equal(ss.K[:3], np.eye(3))
    assert not ss.K[3:].any()


def test_zero_model_state_space(grid):
    ss = var_to_ss(VarModel(np.zeros((2, 2, 2)), np.eye(2), 120.0))
    assert not ss.C.any()
    H = ss_transfer(ss, grid).values
    np.testing.assert_array_equal(H, np.broadcast_to(np.eye(2), H.shape))


def test_ss_transfer_zero_gain(grid):
    ss = StateSpaceModel(np.diag([0.5, 0.2]), np.ones((2, 2)), np.zeros((2, 2)), np.eye(2), 120.0)
    H = ss_transfer(ss, grid).values
    np.testing.assert_array_equal(H, np.broadcast_to(np.eye(2), H.shape))


def test_ss_transfer_ar1_closed_form(grid):
    a = -0.6
    H = ss_transfer(var_to_ss(VarModel([[[a]]], [[1.0]], 120.0)), grid).values[:, 0, 0]
    expected = 1 / (1 - a * np.exp(-2j * np.pi * grid.freqs / 120.0))
    assert np.abs(H - expected).max() < 1e-12


def test_transfer_cross_oracle(rng):
    grid = FrequencyGrid(1.0, 512)
    for _ in range(20):
        m = random_stable_var(rng, int(rng.integers(1, 6)), int(rng.integers(1, 5)))
        diff = transfer_function(m, grid).values - ss_transfer(var_to_ss(m), grid).values
        assert np.abs(diff).max() < 1e-10


def test_state_space_shape_checks():
    with pytest.raises(InvalidSpec):
        StateSpaceModel(np.eye(2), np.ones((1, 3)), np.ones((2, 1)), [[1.0]])


# --- Riccati solver ---------------------------------------------------------

def test_dare_full_observation_is_exact(fig1_model):
    ss = var_to_ss(fig1_model)
    K, sig = ss.K, ss.sigma
    sol = dare_solve(ss.A, ss.C, K @ sig @ K.T, K @ sig, sig)
    assert np.abs(sol.P).max() == 0.0
    np.testing.assert_allclose(sol.sigma_r, sig, atol=1e-14)
    np.testing.assert_allclose(sol.K_r, K, atol=1e-14)
    assert sol.iterations == 1


def test_dare_scalar():
    sol = dare_solve([[0.5]], [[1.0]], [[1.0]], [[0.0]], [[1.0]])
    # P = 0.25 P - 0.25 P^2 / (P + 1) + 1  <=>  P^2 - 0.25 P - 1 = 0
    root = max(np.roots([1.0, -0.25, -1.0]).real)
    assert sol.P[0, 0] == pytest.approx(root, abs=1e-11)
    assert sol.P[0, 0] == pytest.approx((0.25 + np.sqrt(4.0625)) / 2, abs=1e-11)
    assert sol.sigma_r[0, 0] == pytest.approx(root + 1, abs=1e-11)
    assert sol.K_r[0, 0] == pytest.approx(0.5 * root / (root + 1), abs=1e-11)
    assert sol.residual < 1e-12


def test_dare_matches_scipy(rng):
    for _ in range(20):
        m = random_stable_var(rng, 3, 2)
        ss = var_to_ss(m)
        R = sorted(rng.choice(3, size=2, replace=False).tolist())
        K, sig = ss.K, ss.sigma
        args = (K @ sig @ K.T, K @ sig[:, R], sig[np.ix_(R, R)])
        sol = dare_solve(ss.A, ss.C[R], *args)
        ref = scipy.linalg.solve_discrete_are(ss.A.T, ss.C[R].T, args[0], args[2], s=args[1])
        assert np.abs(sol.P - ref).max() < 1e-9


def test_dare_no_convergence(fig1_model):
    ss = var_to_ss(fig1_model)
    K, sig = ss.K, ss.sigma
    with pytest.raises(NoConvergence) as info:
        dare_solve(ss.A, ss.C[[1]], K @ sig @ K.T, K @ sig[:, [1]], sig[[1]][:, [1]], max_iter=3)
    assert info.value.residual > 1e-12


# --- reduced models --------------------------------------------------------

def test_reduce_all_channels_identity(fig1_model):
    ss = var_to_ss(fig1_model)
    red = reduce(ss, [0, 1, 2])
    np.testing.assert_allclose(red.K, ss.K, atol=1e-10)
    np.testing.assert_allclose(red.sigma, ss.sigma, atol=1e-10)


def test_reduce_independent_channel(grid):
    m = VarModel(np.diag([0.8, -0.5])[None], np.diag([1.5, 0.7]), 120.0)
    red = reduce(var_to_ss(m), [0])
    assert red.sigma[0, 0] == pytest.approx(1.5, abs=1e-10)
    H = ss_transfer(red, grid).values[:, 0, 0]
    expected = 1 / (1 - 0.8 * np.exp(-2j * np.pi * grid.freqs / 120.0))
    assert np.abs(H - expected).max() < 1e-10


def test_reduce_fig1_drop_driver(fig1_model, grid):
    ss = var_to_ss(fig1_model)
    red = reduce(ss, [1, 2])
    S = cpsd(fig1_model, grid).block([1, 2]).values
    assert np.abs(ss_cpsd(red, grid).values - S).max() < 1e-8
    assert red.closed_loop_radius() < 1


def test_reduce_respects_channel_order(fig1_model, grid):
    ss = var_to_ss(fig1_model)
    red = reduce(ss, [2, 0])
    S = cpsd(fig1_model, grid).block([2, 0]).values
    assert np.abs(ss_cpsd(red, grid).values - S).max() < 1e-8


def test_reduce_invalid_subset(fig1_model):
    ss = var_to_ss(fig1_model)
    for bad in ([], [0, 0], [3]):
        with pytest.raises(InvalidSpec):
            reduce(ss, bad)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 4), p=st.integers(1, 3))
def test_spectral_factor_identity(seed, n, p):
    rng = np.random.default_rng(seed)
    m = random_stable_var(rng, n, p)
    grid = FrequencyGrid(1.0, 128)
    ss = var_to_ss(m)
    S = cpsd(m, grid)
    for r in range(1, n):
        for subset in itertools.combinations(range(n), r):
            red = reduce(ss, list(subset))
            assert red.closed_loop_radius() < 1
            assert np.abs(ss_cpsd(red, grid).values - S.block(subset).values).max() < 1e-8


# --- causality -------------------------------------------------------------

def test_independent_channels_zero_causality(grid):
    m = VarModel(np.diag([0.8, -0.5, 0.3])[None], np.diag([1.0, 2.0, 0.5]), 120.0)
    ss = var_to_ss(m)
    for t, s in itertools.permutations(range(3), 2):
        cond = [c for c in range(3) if c not in (t, s)]
        assert abs(gc_time(ss, t, [s], cond)) < 1e-10
        assert np.abs(gc_spectral_ss(ss, grid, t, [s], cond).values).max() < 1e-10


def test_fig1_uncoupled_direction_is_zero(fig1_model, grid):
    ss = var_to_ss(fig1_model)
    t, s, c = FIG1_DIRS["3to1"]
    assert gc_time(ss, t, s, c) < 1e-10
    assert gc_spectral_ss(ss, grid, t, s, c).values.max() < 1e-10


@pytest.mark.parametrize("label", ["1to2", "2to3"])
def test_fig1_coupled_directions(fig1_model, grid, label):
    ss = var_to_ss(fig1_model)
    t, s, c = FIG1_DIRS[label]
    f = gc_spectral_ss(ss, grid, t, s, c)
    assert f.label == label
    assert f.values.min() > 0
    peaks = [k for k in range(1, grid.nfreq - 1)
             if f.values[k] >= f.values[k - 1] and f.values[k] >= f.values[k + 1]
             and f.values[k] > 0.5 * f.values.max()]
    assert len(peaks) == 1
    F = gc_time(ss, t, s, c)
    assert F > 0
    fine = FrequencyGrid(grid.fs, 4096)
    assert abs(fine.circle_mean(gc_spectral_ss(ss, fine, t, s, c).values) - F) < 1e-4


def test_fig1_peaks_near_transmitter(fig1_model, grid):
    ss = var_to_ss(fig1_model)
    f = gc_spectral_ss(ss, grid, *FIG1_DIRS["1to2"]).values
    assert abs(grid.freqs[np.argmax(f)] - 40.0) < 2.0


def test_bivariate_bridge_to_dc(fig2_models, grid):
    for m in fig2_models.values():
        dc = directed_coherence(m, grid)[0][1].values
        f = gc_spectral_ss(var_to_ss(m), grid, 1, [0]).values
        assert np.abs(f + np.log1p(-dc)).max() < 1e-8


def test_nonnegative_and_integral_bound(rng):
    grid = FrequencyGrid(1.0, 1024)
    for k in range(20):
        n = int(rng.integers(2, 5))
        m = random_stable_var(rng, n, int(rng.integers(1, 4)), diagonal_sigma=bool(k % 2))
        ss = var_to_ss(m)
        cond = list(range(2, n))
        f = gc_spectral_ss(ss, grid, 0, [1], cond).values
        assert f.min() >= 0
        assert grid.circle_mean(f) <= gc_time(ss, 0, [1], cond) + 1e-6


def test_scale_invariance(fig1_model, grid):
    D = np.diag([3.0, 0.2, 7.5])
    Dinv = np.linalg.inv(D)
    scaled = VarModel(np.array([D @ A @ Dinv for A in fig1_model.coeffs]),
                      D @ fig1_model.sigma @ D, fig1_model.fs)
    a, b = var_to_ss(fig1_model), var_to_ss(scaled)
    for t, s, c in FIG1_DIRS.values():
        fa = gc_spectral_ss(a, grid, t, s, c).values
        fb = gc_spectral_ss(b, grid, t, s, c).values
        assert np.abs(fa - fb).max() < 1e-10


def test_extra_channels_are_marginalized(rng, grid):
    m = random_stable_var(rng, 4, 2, fs=120.0, diagonal_sigma=True)
    ss = var_to_ss(m)
    sub = reduce(ss, [0, 1, 3])
    direct = gc_spectral_ss(ss, grid, 3, [0], [1]).values
    via_sub = gc_spectral_ss(sub, grid, 2, [0], [1]).values
    assert np.abs(direct - via_sub).max() < 1e-8
    assert gc_time(ss, 3, [0], [1]) == pytest.approx(gc_time(sub, 2, [0], [1]), abs=1e-10)


def test_multivariate_source_block(fig1_model, grid):
    ss = var_to_ss(fig1_model)
    f = gc_spectral_ss(ss, grid, 2, [0, 1])
    assert f.label == "12to3"
    assert f.values.min() >= 0
    fine = FrequencyGrid(grid.fs, 4096)
    F = gc_time(ss, 2, [0, 1])
    assert fine.circle_mean(gc_spectral_ss(ss, fine, 2, [0, 1]).values) <= F + 1e-6


def test_correlated_innovations_need_decorrelation(grid):
    coeffs = np.zeros((1, 2, 2))
    coeffs[0] = [[0.5, 0.0], [0.4, 0.3]]
    m = VarModel(coeffs, [[1.0, 0.4], [0.4, 1.0]], 120.0)
    ss = var_to_ss(m)
    with pytest.raises(NonDiagonalSigma):
        gc_spectral_ss(ss, grid, 1, [0], decorrelate=False)
    f = gc_spectral_ss(ss, grid, 1, [0]).values
    assert f.min() >= 0 and f.max() > 0


def test_direction_validation(fig1_model, grid):
    ss = var_to_ss(fig1_model)
    with pytest.raises(InvalidSpec):
        gc_spectral_ss(ss, grid, 1, [1])
    with pytest.raises(InvalidSpec):
        gc_time(ss, 1, [])
    with pytest.raises(InvalidSpec):
        gc_time(ss, 1, [5])
