"""Innovations-form state-space models and closed-form Granger-Geweke causality.

A VAR(p) is rewritten as ``z(t+1) = A z(t) + K e(t)``, ``x(t) = C z(t) + e(t)``.
Any subset of observed channels is then again a state-space process whose
innovations model follows from a discrete algebraic Riccati equation, so the
reduced model needed for causality is obtained exactly instead of being
approximated by a finite-order VAR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classic import _check_direction, conditional_gc_values
from .errors import IndefiniteIterate, InvalidSpec, NoConvergence
from .spectral import GcSpectrum, SpectralMatrix, batched_inverse, spectrum_from_factor
from .var import check_pos_def, companion

DARE_TOL = 1e-12
DARE_MAX_ITER = 10_000
CLAMP = 1e-10


@dataclass(frozen=True)
class StateSpaceModel:
    A: np.ndarray
    C: np.ndarray
    K: np.ndarray
    sigma: np.ndarray
    fs: float = 1.0

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        K = np.atleast_2d(np.asarray(self.K, dtype=float))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        m, n = A.shape[0], C.shape[0]
        if A.shape != (m, m) or C.shape != (n, m) or K.shape != (m, n) or sigma.shape != (n, n):
            raise InvalidSpec(
                f"inconsistent shapes A{A.shape} C{C.shape} K{K.shape} sigma{sigma.shape}"
            )
        check_pos_def(sigma)
        for name, arr in (("A", A), ("C", C), ("K", K), ("sigma", sigma)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "fs", float(self.fs))

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.C.shape[0]

    def closed_loop_radius(self):
        """Spectral radius of ``A - K C``; below one for a minimum-phase model."""
        return _radius(self.A - self.K @ self.C)


@dataclass(frozen=True)
class DareSolution:
    P: np.ndarray
    K_r: np.ndarray
    sigma_r: np.ndarray
    iterations: int
    residual: float


def _radius(M):
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def var_to_ss(model):
    """State-space form of a VAR whose state stacks the last ``p`` observations."""
    model.check_stable()
    n, p = model.n, model.p
    A = companion(model)
    C = A[:n].copy()
    K = np.zeros((n * p, n))
    K[:n] = np.eye(n)
    return StateSpaceModel(A, C, K, model.sigma, model.fs)


def ss_transfer(ssm, grid):
    """``H(f) = I + C (e^{i 2 pi f/fs} I - A)^{-1} K`` at every bin."""
    z = np.exp(2j * np.pi * grid.freqs / grid.fs)
    M = z[:, None, None] * np.eye(ssm.m)[None] - ssm.A[None]
    inv = batched_inverse(M, grid)
    H = np.eye(ssm.n)[None] + ssm.C[None] @ inv @ ssm.K[None]
    return SpectralMatrix(grid, H)


def ss_cpsd(ssm, grid):
    return spectrum_from_factor(ss_transfer(ssm, grid), ssm.sigma)


def dare_solve(A, C_r, Q, S, R, *, tol=DARE_TOL, max_iter=DARE_MAX_ITER):
    """Steady-state Kalman predictor by fixed-point Riccati iteration.

    Iterates

        P <- A P A' - (A P C' + S)(C P C' + R)^{-1}(A P C' + S)' + Q

    from ``P = 0`` until the largest absolute entry of the update is below
    `tol`.

    Parameters
    ----------
    A : (m, m) array
        Stable state transition.
    C_r : (r, m) array
        Observation map of the observed subprocess.
    Q, S, R : arrays
        State-noise covariance ``(m, m)``, state/observation noise
        cross-covariance ``(m, r)`` and observation-noise covariance ``(r, r)``.

    Returns
    -------
    DareSolution
        ``sigma_r = C P C' + R`` and ``K_r = (A P C' + S) sigma_r^{-1}``.

    Raises
    ------
    NoConvergence
        If `max_iter` iterations do not reach `tol`.
    IndefiniteIterate
        If ``C P C' + R`` stops being invertible along the way.
    """
    A = np.asarray(A, dtype=float)
    C_r = np.atleast_2d(np.asarray(C_r, dtype=float))
    Q = np.asarray(Q, dtype=float)
    S = np.atleast_2d(np.asarray(S, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    P = np.zeros_like(A)
    delta = np.inf
    for it in range(1, max_iter + 1):
        V = C_r @ P @ C_r.T + R
        M = A @ P @ C_r.T + S
        try:
            cho = np.linalg.cholesky(V)
        except np.linalg.LinAlgError:
            raise IndefiniteIterate(f"innovation covariance lost definiteness at iteration {it}") from None
        W = np.linalg.solve(cho, M.T)  # L^{-1} M'
        P_new = A @ P @ A.T - W.T @ W + Q
        P_new = 0.5 * (P_new + P_new.T)
        delta = float(np.max(np.abs(P_new - P), initial=0.0))
        P = P_new
        if delta < tol:
            break
    else:
        raise NoConvergence(delta, max_iter)

    sigma_r = C_r @ P @ C_r.T + R
    sigma_r = 0.5 * (sigma_r + sigma_r.T)
    try:
        K_r = np.linalg.solve(sigma_r.T, (A @ P @ C_r.T + S).T).T
    except np.linalg.LinAlgError:
        raise IndefiniteIterate("reduced innovation covariance is singular") from None
    return DareSolution(P, K_r, sigma_r, it, delta)


def reduce(ssm, channels):
    """Innovations model of the subprocess observed on `channels`.

    `channels` is an ordered sequence; the returned model's observation ``a``
    is input channel ``channels[a]``.
    """
    chans = [int(c) for c in channels]
    if not chans or len(set(chans)) != len(chans) or min(chans) < 0 or max(chans) >= ssm.n:
        raise InvalidSpec(f"invalid channel subset {channels} for {ssm.n} channels")
    K, sig = ssm.K, ssm.sigma
    C_r = ssm.C[chans]
    Q = K @ sig @ K.T
    S = K @ sig[:, chans]
    R = sig[np.ix_(chans, chans)]
    sol = dare_solve(ssm.A, C_r, Q, S, R)
    return StateSpaceModel(ssm.A, C_r, sol.K_r, sol.sigma_r, ssm.fs)


def _clamp(values):
    values = np.asarray(values, dtype=float)
    return np.where((values < 0) & (values > -CLAMP), 0.0, values)


def _restrict(ssm, target, sources, cond):
    """Drop channels outside the direction and re-index the direction into the result."""
    used = [target, *sources, *cond]
    if max(used) >= ssm.n:
        raise InvalidSpec(f"channel index out of range for {ssm.n} channels")
    if len(used) == ssm.n:
        return ssm, list(range(ssm.n))
    keep = sorted(used)
    return reduce(ssm, keep), keep


def gc_time(ssm, target, sources, cond=()):
    """Time-domain conditional GGC ``F_{sources -> target | cond}`` in nats."""
    sources = tuple(int(s) for s in sources)
    cond = tuple(int(c) for c in cond)
    _check_direction(int(target), sources, cond)
    sub, keep = _restrict(ssm, int(target), sources, cond)
    pos = {c: a for a, c in enumerate(keep)}
    t = pos[int(target)]
    red = reduce(sub, [t, *(pos[c] for c in cond)])
    F = float(np.log(red.sigma[0, 0] / sub.sigma[t, t]))
    return 0.0 if -CLAMP < F < 0 else F


def gc_spectral_ss(ssm, grid, target, sources, cond=(), *, decorrelate=True):
    """Conditional spectral GGC ``f_{sources -> target | cond}`` in closed form.

    The reduced model on ``{target} + cond`` is the exact innovations model of
    that subprocess. Channels not named in the direction are marginalized
    out first. Negatives smaller than ``1e-10`` in magnitude are set to zero.

    Parameters
    ----------
    ssm : StateSpaceModel
    grid : FrequencyGrid
    target : int
    sources, cond : iterable of int
    decorrelate : bool
        Remove the target innovation's correlation with the others before
        splitting the spectrum. When False, correlated innovations raise
        :class:`NonDiagonalSigma`.

    Returns
    -------
    GcSpectrum
    """
    target = int(target)
    sources = tuple(int(s) for s in sources)
    cond = tuple(int(c) for c in cond)
    _check_direction(target, sources, cond)
    sub, keep = _restrict(ssm, target, sources, cond)
    pos = {c: a for a, c in enumerate(keep)}
    reduced_idx = [pos[target], *(pos[c] for c in cond)]
    red = reduce(sub, reduced_idx)
    values = conditional_gc_values(
        ss_transfer(sub, grid), sub.sigma, ss_transfer(red, grid), red.sigma,
        pos[target], reduced_idx, decorrelate=decorrelate,
    )
    return GcSpectrum(grid, target, sources, cond, _clamp(values))
