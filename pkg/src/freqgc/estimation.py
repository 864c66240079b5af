"""Ordinary least-squares fitting of full and reduced VAR models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, InvalidSpec, SingularRegressors
from .var import TimeSeriesData, VarModel


@dataclass(frozen=True)
class VarFit:
    """Result of :func:`fit_ols`.

    ``model`` is expressed in the channel order given by ``channels`` (sorted
    original indices), so ``model.coeffs[k, a, b]`` couples ``channels[b]``
    into ``channels[a]``.
    """

    model: VarModel
    channels: tuple
    residuals: np.ndarray

    @property
    def t_effective(self):
        return self.residuals.shape[0]


def lag_matrix(x, p):
    """Regressor rows ``[x(t-1), ..., x(t-p)]`` for ``t = p .. T-1``."""
    T = x.shape[0]
    return np.concatenate([x[p - k : T - k] for k in range(1, p + 1)], axis=1)


def _normalize_channels(channels, n):
    if channels is None:
        return tuple(range(n))
    chans = tuple(sorted(set(int(c) for c in channels)))
    if not chans:
        raise InvalidSpec("channel subset must be non-empty")
    if chans[0] < 0 or chans[-1] >= n:
        raise InvalidSpec(f"channels {chans} out of range for {n}-channel data")
    return chans


def fit_ols(data, p, channels=None, *, demean=False, ridge=False):
    """Least-squares VAR(p) fit restricted to a channel subset.

    Parameters
    ----------
    data : TimeSeriesData
    p : int
        Model order.
    channels : iterable of int, optional
        Channels to keep; all by default. Excluded channels never enter the
        regression.
    demean : bool
        Subtract the per-channel sample mean first.
    ridge : bool
        On rank-deficient regressors, add ``1e-10 * trace`` to the normal
        equations instead of raising.

    Returns
    -------
    VarFit
        Residual covariance uses divisor ``T - p``. The estimate is not
        checked for stability.
    """
    if p < 1:
        raise InvalidSpec(f"order must be >= 1, got {p}")
    chans = _normalize_channels(channels, data.n)
    x = np.asarray(data.samples[:, chans], dtype=float)
    if demean:
        x = x - x.mean(axis=0)
    T, n = x.shape
    if T <= p * n + p:
        raise InsufficientData(f"T={T} too short for order {p} with {n} channels")

    Z = lag_matrix(x, p)
    Y = x[p:]
    q, r = np.linalg.qr(Z)
    diag = np.abs(np.diag(r))
    rank_ok = diag.size > 0 and diag.min() > diag.max() * Z.shape[0] * np.finfo(float).eps
    if rank_ok:
        B = np.linalg.solve(r, q.T @ Y)
    elif ridge:
        G = Z.T @ Z
        G[np.diag_indices_from(G)] += 1e-10 * np.trace(G)
        B = np.linalg.solve(G, Z.T @ Y)
    else:
        raise SingularRegressors("lagged regressor matrix is rank deficient")

    resid = Y - Z @ B
    t_eff = resid.shape[0]
    sigma = resid.T @ resid / t_eff
    sigma = 0.5 * (sigma + sigma.T)
    coeffs = B.T.reshape(n, p, n).transpose(1, 0, 2)
    return VarFit(VarModel(coeffs, sigma, data.fs), chans, resid)


def aic(fit):
    n = fit.model.n
    _, logdet = np.linalg.slogdet(fit.model.sigma)
    return fit.t_effective * logdet + 2.0 * fit.model.p * n * n


def order_select_aic(data, p_max, channels=None):
    """Order in ``1 .. p_max`` minimizing AIC; ties go to the smaller order."""
    if p_max < 1:
        raise InvalidSpec(f"p_max must be >= 1, got {p_max}")
    best_p, best = 1, np.inf
    for p in range(1, p_max + 1):
        score = aic(fit_ols(data, p, channels))
        if score < best:
            best_p, best = p, score
    return best_p
