"""Stable vector autoregressive processes: construction, stability, simulation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EigenFailure, InvalidSpec, NonPosDefSigma, UnstableSystem

DEFAULT_BURN_IN = 1000


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def check_pos_def(sigma, name="sigma"):
    """Raise NonPosDefSigma unless `sigma` is symmetric positive definite."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise NonPosDefSigma(f"{name} must be square, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12 * max(1.0, np.abs(sigma).max())):
        raise NonPosDefSigma(f"{name} is not symmetric")
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise NonPosDefSigma(f"{name} is not positive definite") from None


@dataclass(frozen=True)
class VarModel:
    """A vector autoregressive process.

    ``coeffs[k, i, j]`` is the gain from channel ``j`` at lag ``k + 1`` onto
    channel ``i``. Stability is not enforced here because estimated models may
    legitimately be unstable; call :meth:`check_stable` where it matters.
    """

    coeffs: np.ndarray
    sigma: np.ndarray
    fs: float = 1.0

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim == 2:
            coeffs = coeffs[None]
        if coeffs.ndim != 3 or coeffs.shape[1] != coeffs.shape[2] or coeffs.shape[0] < 1:
            raise InvalidSpec(f"coeffs must have shape (p, n, n), got {coeffs.shape}")
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        if sigma.shape != coeffs.shape[1:]:
            raise InvalidSpec(f"sigma shape {sigma.shape} does not match n={coeffs.shape[1]}")
        if not np.all(np.isfinite(coeffs)):
            raise InvalidSpec("coefficients must be finite")
        if not self.fs > 0:
            raise InvalidSpec(f"fs must be positive, got {self.fs}")
        check_pos_def(sigma)
        object.__setattr__(self, "coeffs", _frozen(coeffs))
        object.__setattr__(self, "sigma", _frozen(sigma))
        object.__setattr__(self, "fs", float(self.fs))

    @property
    def n(self):
        return self.coeffs.shape[1]

    @property
    def p(self):
        return self.coeffs.shape[0]

    def check_stable(self):
        r = spectral_radius(self)
        if r >= 1.0:
            raise UnstableSystem(r)
        return r


@dataclass(frozen=True)
class Oscillator:
    f0: float
    rho: float


@dataclass(frozen=True)
class Coupling:
    src: int
    dst: int
    lag: int
    gain: float


@dataclass(frozen=True)
class PolePlacementSpec:
    """Channels built from resonant AR(2) factors plus directed lagged couplings.

    ``nodes[c]`` lists the ``(f0, rho)`` pole pairs of channel ``c``.
    """

    fs: float
    nodes: tuple
    couplings: tuple = ()
    sigma_diag: tuple = None

    def __post_init__(self):
        nodes = tuple(tuple(Oscillator(*pp) if not isinstance(pp, Oscillator) else pp
                            for pp in node) for node in self.nodes)
        couplings = tuple(c if isinstance(c, Coupling) else Coupling(*c) for c in self.couplings)
        sigma_diag = self.sigma_diag
        if sigma_diag is None:
            sigma_diag = (1.0,) * len(nodes)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "sigma_diag", tuple(float(s) for s in sigma_diag))

    @property
    def n(self):
        return len(self.nodes)

    @property
    def order(self):
        pairs = max((len(node) for node in self.nodes), default=0)
        lags = max((c.lag for c in self.couplings), default=0)
        return max(2 * pairs, lags, 1)

    def validate(self):
        if not self.fs > 0:
            raise InvalidSpec(f"fs must be positive, got {self.fs}")
        if self.n < 1:
            raise InvalidSpec("at least one node is required")
        if len(self.sigma_diag) != self.n:
            raise InvalidSpec(f"sigma_diag has {len(self.sigma_diag)} entries for {self.n} nodes")
        if any(not s > 0 for s in self.sigma_diag):
            raise InvalidSpec("innovation variances must be positive")
        for c, node in enumerate(self.nodes):
            for osc in node:
                if not 0.0 <= osc.f0 <= self.fs / 2:
                    raise InvalidSpec(f"node {c}: f0={osc.f0} outside [0, fs/2]")
                if not 0.0 < osc.rho < 1.0:
                    raise InvalidSpec(f"node {c}: rho={osc.rho} outside (0, 1)")
        for cp in self.couplings:
            if not (0 <= cp.src < self.n and 0 <= cp.dst < self.n):
                raise InvalidSpec(f"coupling {cp} references a missing channel")
            if cp.src == cp.dst:
                raise InvalidSpec(f"coupling {cp} is a self-loop")
            if cp.lag < 1:
                raise InvalidSpec(f"coupling {cp} has lag < 1")


@dataclass(frozen=True)
class TimeSeriesData:
    samples: np.ndarray
    fs: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] == 0:
            raise InvalidSpec(f"samples must be a non-empty (T, n) matrix, got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise InvalidSpec("samples contain non-finite values")
        object.__setattr__(self, "samples", _frozen(x))
        object.__setattr__(self, "fs", float(self.fs))

    @property
    def T(self):
        return self.samples.shape[0]

    @property
    def n(self):
        return self.samples.shape[1]


def resonator_polynomial(oscillators, fs):
    """Lag polynomial ``[1, -a1, -a2, ...]`` of a cascade of AR(2) resonators."""
    poly = np.array([1.0])
    for osc in oscillators:
        factor = [1.0, -2.0 * osc.rho * np.cos(2 * np.pi * osc.f0 / fs), osc.rho ** 2]
        poly = np.convolve(poly, factor)
    return poly


def build_from_poles(spec):
    """Build a VarModel whose channels resonate at the requested pole pairs.

    Parameters
    ----------
    spec : PolePlacementSpec

    Returns
    -------
    VarModel
        Stable model of order ``spec.order``.

    Raises
    ------
    InvalidSpec
        If the specification is malformed.
    UnstableSystem
        If the couplings destabilize the assembled system.
    """
    spec.validate()
    n, p = spec.n, spec.order
    coeffs = np.zeros((p, n, n))
    for c, node in enumerate(spec.nodes):
        poly = resonator_polynomial(node, spec.fs)
        coeffs[: len(poly) - 1, c, c] = -poly[1:]
    for cp in spec.couplings:
        coeffs[cp.lag - 1, cp.dst, cp.src] += cp.gain
    model = VarModel(coeffs, np.diag(spec.sigma_diag), spec.fs)
    model.check_stable()
    return model


def companion(model):
    """Companion matrix of a VAR(p): ``[A1 ... Ap]`` on top, identities below."""
    n, p = model.n, model.p
    comp = np.zeros((n * p, n * p))
    comp[:n, :] = np.concatenate(list(model.coeffs), axis=1)
    comp[n:, :-n] = np.eye(n * (p - 1))
    return comp


def spectral_radius(model):
    try:
        eig = np.linalg.eigvals(companion(model))
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return float(np.max(np.abs(eig))) if eig.size else 0.0


def stationary_covariance(model):
    """Lag-0 autocovariance of a stable VAR from the companion Lyapunov equation."""
    model.check_stable()
    n, p = model.n, model.p
    q = np.zeros((n * p, n * p))
    q[:n, :n] = model.sigma
    gamma = scipy.linalg.solve_discrete_lyapunov(companion(model), q)
    return gamma[:n, :n]


def simulate(model, T, burn_in=DEFAULT_BURN_IN, seed=0):
    """Draw a Gaussian realization of the process from zero initial conditions.

    The first `burn_in` samples are discarded. Output depends only on
    ``(model, T, burn_in, seed)``.
    """
    if T < 1 or burn_in < 0:
        raise InvalidSpec(f"need T >= 1 and burn_in >= 0, got T={T}, burn_in={burn_in}")
    model.check_stable()
    chol = check_pos_def(model.sigma)
    n, p = model.n, model.p
    total = T + burn_in
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((total, n)) @ chol.T
    stacked = np.concatenate(list(model.coeffs), axis=1)  # (n, n*p)
    x = np.zeros((total + p, n))
    for t in range(total):
        # rows t .. t+p-1 hold lags p .. 1
        past = x[t : t + p][::-1].reshape(-1)
        x[t + p] = stacked @ past + noise[t]
    return TimeSeriesData(x[p + burn_in :], model.fs)


def random_stable_var(rng, n, p, radius=None, fs=1.0, diagonal_sigma=False):
    """Random VarModel with companion spectral radius `radius` (drawn in [0.3, 0.9] if None).

    Lag ``k`` coefficients are scaled by ``c**k``, which scales every
    companion eigenvalue by ``c``.
    """
    if radius is None:
        radius = rng.uniform(0.3, 0.9)
    coeffs = rng.standard_normal((p, n, n)) / np.sqrt(n * p)
    r = spectral_radius(VarModel(coeffs, np.eye(n), fs))
    if r > 0:
        c = radius / r
        coeffs = coeffs * (c ** np.arange(1, p + 1))[:, None, None]
    if diagonal_sigma:
        sigma = np.diag(rng.uniform(0.5, 2.0, n))
    else:
        L = rng.standard_normal((n, n)) * 0.5 + np.eye(n)
        sigma = L @ L.T + 0.1 * np.eye(n)
    return VarModel(coeffs, sigma, fs)
