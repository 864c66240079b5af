"""Dual-model conditional spectral Granger-Geweke causality.

The full model on ``{target} + sources + conditioning`` and a reduced model on
``{target} + conditioning`` are fitted independently. Because the reduced
process is generally not a finite-order VAR, this estimator is biased at low
orders and noisy at high orders. Its output is left raw on purpose: no
clamping, smoothing or repair.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidSpec, NonDiagonalSigma
from .spectral import GcSpectrum, SpectralMatrix, batched_inverse, check_same_grid, transfer_function
from .var import check_pos_def


def normalize_innovations(H, sigma, target):
    """Decorrelate the target innovation from all others.

    Applies ``e~ = P e`` with ``P`` leaving the target innovation untouched and
    subtracting its regression from every other innovation, and compensates
    ``H~ = H P^{-1}`` so that ``H~ sigma~ H~^* = H sigma H^*``.

    Parameters
    ----------
    H : SpectralMatrix
    sigma : (n, n) array
    target : int
        Position of the target channel within `H`.

    Returns
    -------
    H_tilde : SpectralMatrix
    sigma_tilde : (n, n) array
        Zero covariance between target and the rest; the rest block becomes
        the Schur complement.
    """
    sigma = np.asarray(sigma, dtype=float)
    check_pos_def(sigma)
    beta = sigma[:, target] / sigma[target, target]
    beta[target] = 0.0
    P = np.eye(sigma.shape[0])
    P[:, target] -= beta
    sigma_tilde = P @ sigma @ P.T
    sigma_tilde = 0.5 * (sigma_tilde + sigma_tilde.T)
    sigma_tilde[target, :] = sigma_tilde[:, target] = 0.0
    sigma_tilde[target, target] = sigma[target, target]
    Hv = np.array(H.values)
    if np.any(beta):
        Hv[:, :, target] = Hv[:, :, target] + Hv @ beta
    return SpectralMatrix(H.grid, Hv), sigma_tilde


def is_diagonal(sigma, tol=1e-12):
    sigma = np.asarray(sigma)
    return np.abs(sigma - np.diag(np.diag(sigma))).max(initial=0.0) <= tol


def conditional_gc_values(H_full, sigma, G_reduced, sigma_r, target, reduced_idx, *,
                          strict=True, decorrelate=True):
    """Per-bin ``f_{sources -> target | cond}`` from full and reduced spectral factors.

    Parameters
    ----------
    H_full : SpectralMatrix
        Full-model transfer function over channels ``0 .. n-1``.
    sigma : (n, n) array
        Full-model innovation covariance.
    G_reduced : SpectralMatrix
        Reduced-model transfer function whose row/column ``a`` is full-model
        channel ``reduced_idx[a]``.
    sigma_r : array
        Reduced-model innovation covariance, same ordering as `G_reduced`.
    target : int
        Target position in the full model; must appear in `reduced_idx`.
    reduced_idx : sequence of int
        Full-model positions kept by the reduced model (target and conditioning).
        All other channels are sources.

    Returns
    -------
    np.ndarray
        Raw log-ratio per bin; NaN where the reduced factor cannot be inverted
        (only when ``strict`` is False).
    """
    grid = check_same_grid(H_full.grid, G_reduced.grid)
    n = H_full.n
    reduced_idx = list(reduced_idx)
    t_red = reduced_idx.index(target)
    if decorrelate:
        H_tilde, sigma_tilde = normalize_innovations(H_full, sigma, target)
    else:
        if not is_diagonal(sigma):
            raise NonDiagonalSigma("innovations are correlated and decorrelation is disabled")
        H_tilde, sigma_tilde = H_full, np.asarray(sigma, dtype=float)

    G_emb = np.broadcast_to(np.eye(n, dtype=complex), (grid.nfreq, n, n)).copy()
    idx = np.asarray(reduced_idx)
    G_emb[:, idx[:, None], idx[None, :]] = G_reduced.values
    G_inv = batched_inverse(G_emb, grid, strict=strict)
    # only the target row of Q = G_emb^{-1} H_tilde is needed
    Q_tt = np.einsum("fm,fm->f", G_inv[:, target, :], H_tilde.values[:, :, target])
    own = np.abs(Q_tt) ** 2 * sigma_tilde[target, target]
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.log(np.asarray(sigma_r)[t_red, t_red] / own)
    values[~np.isfinite(values)] = np.nan
    return values


def _positions(channels):
    return {c: a for a, c in enumerate(channels)}


def gc_spectral_classic(full, reduced, grid, target, sources, cond=()):
    """Conditional spectral GGC from separately fitted full and reduced VARs.

    Parameters
    ----------
    full, reduced : VarFit
        ``full.channels`` must be exactly ``{target} | sources | cond`` and
        ``reduced.channels`` exactly ``{target} | cond``.
    grid : FrequencyGrid
    target : int
    sources, cond : iterable of int
        Original channel indices.

    Returns
    -------
    GcSpectrum
        Unclamped values; bins where the reduced transfer matrix is singular
        are NaN and counted in ``nan_count``.
    """
    sources = tuple(int(s) for s in sources)
    cond = tuple(int(c) for c in cond)
    target = int(target)
    _check_direction(target, sources, cond)
    if set(full.channels) != {target, *sources, *cond}:
        raise InvalidSpec(f"full fit covers {full.channels}, need exactly {{target}}+sources+cond")
    if set(reduced.channels) != {target, *cond}:
        raise InvalidSpec(f"reduced fit covers {reduced.channels}, need exactly {{target}}+cond")
    if full.model.fs != reduced.model.fs:
        raise InvalidSpec("full and reduced fits have different sampling rates")

    pos = _positions(full.channels)
    H = transfer_function(full.model, grid)
    G = transfer_function(reduced.model, grid, strict=False)
    reduced_idx = [pos[c] for c in reduced.channels]
    values = conditional_gc_values(H, full.model.sigma, G, reduced.model.sigma,
                                   pos[target], reduced_idx, strict=False)
    return GcSpectrum(grid, target, sources, cond, values)


def _check_direction(target, sources, cond):
    if not sources:
        raise InvalidSpec("at least one source channel is required")
    everything = [target, *sources, *cond]
    if len(set(everything)) != len(everything):
        raise InvalidSpec(f"target {target}, sources {sources} and cond {cond} must be disjoint")
    if min(everything) < 0:
        raise InvalidSpec("channel indices must be non-negative")
