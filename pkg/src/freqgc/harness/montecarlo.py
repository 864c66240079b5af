"""Monte Carlo experiments comparing the classic and state-space GGC estimators."""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..classic import gc_spectral_classic
from ..errors import FreqGCError, GridMismatch, InvalidSpec
from ..estimation import fit_ols
from ..spectral import FrequencyGrid, GcSpectrum, cpsd, directed_coherence, spectral_decomposition
from ..statespace import gc_spectral_ss, var_to_ss
from ..var import simulate
from .config import build_system, with_receiver

log = logging.getLogger(__name__)

PROBS = (0.05, 0.5, 0.95)


@dataclass(frozen=True)
class McSummary:
    """Per-bin order statistics of one estimator along one direction.

    ``valid_count[b]`` is the number of realizations with a finite value at
    bin ``b``; percentiles are taken over those only.
    """

    grid: FrequencyGrid
    direction: tuple
    method: str
    median: np.ndarray
    p05: np.ndarray
    p95: np.ndarray
    valid_count: np.ndarray
    n_realizations: int
    truth: GcSpectrum | None = None

    @property
    def label(self):
        target, sources, _ = self.direction
        return "".join(str(s + 1) for s in sources) + f"to{target + 1}"


def percentile_summary(curves, probs=PROBS, *, method="", truth=None):
    """Median and outer percentiles per bin, ignoring NaNs.

    Parameters
    ----------
    curves : list of GcSpectrum
        Must share one grid and one direction.
    probs : (low, mid, high)
        Probabilities in [0, 1]; linear interpolation between order statistics.

    Returns
    -------
    McSummary
    """
    curves = list(curves)
    if not curves:
        raise InvalidSpec("cannot summarize an empty list of curves")
    grid = curves[0].grid
    for c in curves[1:]:
        if c.grid != grid:
            raise GridMismatch(f"curve grid {c.grid} differs from {grid}")
    first = curves[0]
    direction = (first.target, tuple(first.sources), tuple(first.conditioning))
    stack = np.vstack([np.asarray(c.values, dtype=float) for c in curves])
    valid = np.count_nonzero(np.isfinite(stack), axis=0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        lo, mid, hi = np.nanpercentile(stack, [100 * p for p in probs], axis=0)
    return McSummary(grid, direction, method, mid, lo, hi, valid, len(curves), truth)


def method_labels(cfg):
    labels = []
    if "ss" in cfg.methods:
        labels.append("ss")
    if "classic" in cfg.methods:
        labels.extend(f"var_p{int(p)}" for p in cfg.orders)
    return labels


def _directions(cfg):
    return [(int(t), tuple(int(s) for s in src), tuple(int(c) for c in cond))
            for t, src, cond in cfg.directions]


def _fig1_realization(args):
    """All estimator curves of one realization: ``{method: [values per direction]}``."""
    cfg, index = args
    model = build_system(cfg.system)
    grid = FrequencyGrid(model.fs, cfg.nfreq)
    directions = _directions(cfg)
    nan = np.full(grid.nfreq, np.nan)
    out = {label: [nan] * len(directions) for label in method_labels(cfg)}
    try:
        data = simulate(model, cfg.T, cfg.burn_in, seed=cfg.seed + index)
    except FreqGCError as exc:
        log.warning("realization %d: simulation failed: %s", index, exc)
        return out
    everyone = tuple(range(model.n))

    if "ss" in cfg.methods:
        order = cfg.ss_order or model.p
        try:
            ssm = var_to_ss(fit_ols(data, order, everyone).model)
            out["ss"] = [gc_spectral_ss(ssm, grid, t, s, c).values for t, s, c in directions]
        except FreqGCError as exc:
            log.warning("realization %d: state-space route failed: %s", index, exc)

    if "classic" in cfg.methods:
        for p in cfg.orders:
            label = f"var_p{int(p)}"
            q = cfg.reduced_order or p
            curves = []
            for t, s, c in directions:
                try:
                    full = fit_ols(data, int(p), (t, *s, *c))
                    red = fit_ols(data, int(q), (t, *c))
                    curves.append(gc_spectral_classic(full, red, grid, t, s, c).values)
                except FreqGCError as exc:
                    log.warning("realization %d, order %d: classic route failed: %s", index, p, exc)
                    curves.append(nan)
            out[label] = curves
    return out


def _map(fn, jobs, workers):
    if workers <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def truth_curves(cfg):
    model = build_system(cfg.system)
    grid = FrequencyGrid(model.fs, cfg.nfreq)
    ssm = var_to_ss(model)
    return [gc_spectral_ss(ssm, grid, t, s, c) for t, s, c in _directions(cfg)]


def run_fig1(cfg):
    """Monte Carlo comparison of GGC estimators along each configured direction.

    Realization ``r`` is simulated with seed ``cfg.seed + r``. The state-space
    route fits a single OLS model (true order unless ``cfg.ss_order``) and
    derives every reduced model exactly; the classic route fits full and
    reduced VARs separately at each order in ``cfg.orders``. Failing
    realizations contribute NaN curves.

    Returns
    -------
    dict
        ``{(method, direction_label): McSummary}`` with method in ``"ss"``,
        ``"var_p<order>"``; insertion order is deterministic.
    """
    cfg.validate()
    model = build_system(cfg.system)
    grid = FrequencyGrid(model.fs, cfg.nfreq)
    directions = _directions(cfg)
    truths = truth_curves(cfg)
    results = _map(_fig1_realization, [(cfg, r) for r in range(cfg.n_realizations)], cfg.workers)

    summaries = {}
    for label in method_labels(cfg):
        for d, (t, s, c) in enumerate(directions):
            curves = [GcSpectrum(grid, t, s, c, res[label][d]) for res in results]
            summary = percentile_summary(curves, method=label, truth=truths[d])
            summaries[(label, summary.label)] = summary
    return summaries


@dataclass(frozen=True)
class Fig2Variant:
    """Model-level spectra of one bivariate transmitter/receiver system."""

    receiver_f0: float
    grid: FrequencyGrid
    S11: np.ndarray
    S22: np.ndarray
    dc_1to2: np.ndarray
    S2_given_1: np.ndarray
    S2_given_2: np.ndarray


def run_fig2(cfg):
    """Spectra, directed coherence and receiver decomposition per receiver variant.

    Channel 0 transmits to channel 1; each variant moves the receiver's
    resonances to one of ``cfg.receiver_f0``. Everything is evaluated at the
    true parameters.
    """
    cfg.validate()
    variants = []
    for f0 in cfg.receiver_f0:
        model = build_system(with_receiver(cfg.system, f0))
        if model.n != 2:
            raise InvalidSpec("the receiver-variant experiment needs a bivariate system")
        grid = FrequencyGrid(model.fs, cfg.nfreq)
        S = cpsd(model, grid).diagonal()
        dc = directed_coherence(model, grid)[0][1].values
        parts = spectral_decomposition(model, grid, receiver=1)
        variants.append(Fig2Variant(float(f0), grid, S[:, 0], S[:, 1], dc, parts[0], parts[1]))
    return variants
