"""Frequency-domain algebra on VAR models.

Transfer functions, cross-power spectral densities, directed coherence and
the partition of a receiver's spectrum into per-transmitter contributions.
Spectral arrays are laid out ``(nfreq, n, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, InvalidSpec, NonDiagonalSigma, SingularAtFrequency

DEFAULT_NFREQ = 512
# reciprocal condition number below which a per-bin inverse is refused
SINGULAR_RCOND = 1e-13


@dataclass(frozen=True)
class FrequencyGrid:
    """``nfreq`` equally spaced frequencies from 0 to Nyquist inclusive."""

    fs: float
    nfreq: int = DEFAULT_NFREQ

    def __post_init__(self):
        if not self.fs > 0:
            raise InvalidSpec(f"fs must be positive, got {self.fs}")
        if self.nfreq < 2:
            raise InvalidSpec(f"nfreq must be >= 2, got {self.nfreq}")
        object.__setattr__(self, "fs", float(self.fs))
        object.__setattr__(self, "nfreq", int(self.nfreq))

    @property
    def freqs(self):
        return np.linspace(0.0, self.fs / 2, self.nfreq)

    @property
    def df(self):
        return self.fs / 2 / (self.nfreq - 1)

    def nearest_bin(self, f):
        return int(np.argmin(np.abs(self.freqs - f)))

    def circle_mean(self, values):
        """Mean over the whole unit circle of a real, even spectral curve.

        Trapezoid rule on ``[0, fs/2]``; evenness makes the other half redundant.
        """
        values = np.asarray(values, dtype=float)
        return float(np.trapezoid(values, dx=1.0) / (self.nfreq - 1))


@dataclass(frozen=True)
class SpectralMatrix:
    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[0] != self.grid.nfreq or v.shape[1] != v.shape[2]:
            raise InvalidSpec(f"values must be (nfreq, n, n), got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.shape[1]

    def block(self, rows, cols=None):
        rows = list(rows)
        cols = rows if cols is None else list(cols)
        return SpectralMatrix(self.grid, self.values[:, rows][:, :, cols])

    def diagonal(self):
        """Real auto-spectra, shape ``(nfreq, n)``."""
        return np.real(np.diagonal(self.values, axis1=1, axis2=2)).copy()


@dataclass(frozen=True)
class DcSpectrum:
    """Squared-magnitude directed coherence ``|DC_{src->dst}(f)|^2``."""

    grid: FrequencyGrid
    src: int
    dst: int
    values: np.ndarray


@dataclass(frozen=True)
class GcSpectrum:
    """Spectral Granger-Geweke causality ``sources -> target | conditioning`` in nats.

    ``nan_count`` counts bins that could not be evaluated (NaN entries).
    """

    grid: FrequencyGrid
    target: int
    sources: tuple
    conditioning: tuple
    values: np.ndarray

    @property
    def nan_count(self):
        return int(np.count_nonzero(np.isnan(self.values)))

    @property
    def label(self):
        src = "".join(str(s + 1) for s in self.sources)
        return f"{src}to{self.target + 1}"


def check_same_grid(*grids):
    g0 = grids[0]
    for g in grids[1:]:
        if g != g0:
            raise GridMismatch(f"grid {g} differs from {g0}")
    return g0


def unit_circle(grid):
    """``exp(-i 2 pi f / fs)`` at every bin."""
    return np.exp(-2j * np.pi * grid.freqs / grid.fs)


def batched_inverse(M, grid, *, strict=True):
    """Invert each ``M[b]``; singular bins raise, or become NaN when not `strict`."""
    M = np.asarray(M, dtype=complex)
    finite = np.isfinite(M).all(axis=(1, 2))
    rcond = np.zeros(M.shape[0])
    if finite.any():
        s = np.linalg.svd(M[finite], compute_uv=False)
        with np.errstate(divide="ignore", invalid="ignore"):
            rcond[finite] = np.nan_to_num(s[:, -1] / s[:, 0])
    bad = ~(rcond > SINGULAR_RCOND)
    if strict and bad.any():
        b = int(np.flatnonzero(bad)[0])
        raise SingularAtFrequency(b, float(grid.freqs[b]))
    out = np.full(M.shape, np.nan, dtype=complex)
    ok = ~bad
    if ok.any():
        out[ok] = np.linalg.inv(M[ok])
    return out


def coefficient_polynomial(model, grid):
    """``I - sum_k A_k exp(-i 2 pi f k / fs)`` at every bin."""
    z = unit_circle(grid)
    powers = z[:, None] ** np.arange(1, model.p + 1)[None, :]  # (nfreq, p)
    return np.eye(model.n)[None] - np.einsum("fk,kij->fij", powers, model.coeffs)


def transfer_function(model, grid, *, strict=True):
    """VAR transfer matrix ``H(f) = (I - sum_k A_k e^{-i 2 pi f k/fs})^{-1}``.

    With ``strict=False`` singular bins are returned as NaN instead of raising
    :class:`SingularAtFrequency`.
    """
    return SpectralMatrix(grid, batched_inverse(coefficient_polynomial(model, grid), grid,
                                                strict=strict))


def spectrum_from_factor(H, sigma):
    """``H(f) sigma H(f)^*`` per bin."""
    v = H.values
    return SpectralMatrix(H.grid, v @ np.asarray(sigma, dtype=complex) @ np.conj(v.transpose(0, 2, 1)))


def cpsd(model, grid):
    """Cross-power spectral density ``S(f) = H(f) sigma H(f)^*``."""
    return spectrum_from_factor(transfer_function(model, grid), model.sigma)


def _require_diagonal(sigma):
    off = sigma - np.diag(np.diag(sigma))
    if np.abs(off).max(initial=0.0) > 1e-12:
        raise NonDiagonalSigma(
            "directed coherence requires uncorrelated innovations "
            f"(largest off-diagonal covariance {np.abs(off).max():.3e})"
        )


def directed_coherence_matrix(model, grid):
    """Array ``dc[f, j, i] = |DC_{i->j}(f)|^2`` (receiver ``j``, transmitter ``i``)."""
    _require_diagonal(model.sigma)
    H = transfer_function(model, grid).values
    power = np.abs(H) ** 2 * np.diag(model.sigma)[None, None, :]
    return power / power.sum(axis=2, keepdims=True)


def directed_coherence(model, grid):
    """Squared directed coherence for every ordered channel pair.

    Returns
    -------
    list of list of DcSpectrum
        ``out[i][j]`` holds ``|DC_{i->j}|^2``, the fraction of channel ``j``'s
        power at each frequency that originates in channel ``i``'s innovations.
        For each receiver the fractions sum to one.
    """
    dc = directed_coherence_matrix(model, grid)
    n = model.n
    return [[DcSpectrum(grid, i, j, dc[:, j, i].copy()) for j in range(n)] for i in range(n)]


def spectral_decomposition(model, grid, receiver):
    """Split the receiver's auto-spectrum by originating transmitter.

    Returns
    -------
    np.ndarray, shape (n, nfreq)
        Row ``i`` is ``S_{receiver|i}(f) = S_rr(f) |DC_{i->receiver}(f)|^2``;
        rows sum to ``S_rr``. Row ``receiver`` is the autonomous part.
    """
    if not 0 <= receiver < model.n:
        raise InvalidSpec(f"receiver {receiver} out of range")
    dc = directed_coherence_matrix(model, grid)
    S_rr = cpsd(model, grid).diagonal()[:, receiver]
    return (S_rr[:, None] * dc[:, receiver, :]).T
