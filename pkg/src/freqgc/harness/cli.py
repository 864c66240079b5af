"""Command line entry point.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
failure of the whole run.
"""

from __future__ import annotations

import argparse
import copy
import logging
import sys

import numpy as np

from ..classic import gc_spectral_classic
from ..errors import FreqGCError, InvalidSpec, NonDiagonalSigma, NonPosDefSigma
from ..estimation import fit_ols
from ..spectral import FrequencyGrid, cpsd, directed_coherence, spectral_decomposition
from ..statespace import gc_spectral_ss, var_to_ss
from ..var import TimeSeriesData, simulate
from .config import FIG1_SYSTEM, FIG2_SYSTEM, build_system, default_config, load_config
from .io import emit_csv
from .runner import run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
PRESETS = {"fig1": FIG1_SYSTEM, "fig2": FIG2_SYSTEM}

log = logging.getLogger("freqgc")


class UsageError(Exception):
    pass


def _system(args):
    if args.config:
        return load_config(args.config).system
    return copy.deepcopy(PRESETS[args.system])


def _grid(model, args):
    return FrequencyGrid(model.fs, args.nfreq)


def _write(cols, out):
    if out:
        emit_csv(cols, out)
    else:
        names = list(cols)
        print(",".join(names))
        for row in zip(*(np.asarray(cols[k], dtype=float) for k in names)):
            print(",".join(f"{v:.12g}" for v in row))


def cmd_simulate(args):
    model = build_system(_system(args))
    data = simulate(model, args.T, args.burn_in, seed=args.seed)
    cols = {f"x{k + 1}": data.samples[:, k] for k in range(model.n)}
    if args.out:
        emit_csv(cols, args.out)
    else:
        np.savetxt(sys.stdout, data.samples, delimiter=",", fmt="%.12g")


def _load_data(path, fs):
    try:
        x = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError:
        x = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=1)
    return TimeSeriesData(x, fs)


def cmd_gc(args):
    target, sources, cond = args.target, tuple(args.sources), tuple(args.cond)
    if args.data:
        data = _load_data(args.data, args.fs)
        grid = FrequencyGrid(data.fs, args.nfreq)
        if args.order is None:
            raise UsageError("--order is required with --data")
        if args.method == "ss":
            full = fit_ols(data, args.order, (target, *sources, *cond))
            pos = {c: a for a, c in enumerate(full.channels)}
            spec = gc_spectral_ss(var_to_ss(full.model), grid, pos[target],
                                  [pos[s] for s in sources], [pos[c] for c in cond])
        else:
            full = fit_ols(data, args.order, (target, *sources, *cond))
            red = fit_ols(data, args.reduced_order or args.order, (target, *cond))
            spec = gc_spectral_classic(full, red, grid, target, sources, cond)
    else:
        if args.method != "ss":
            raise UsageError("the classic method needs --data; true-parameter curves use --method ss")
        model = build_system(_system(args))
        grid = _grid(model, args)
        spec = gc_spectral_ss(var_to_ss(model), grid, target, sources, cond)
    label = "".join(str(s + 1) for s in sources) + f"to{target + 1}"
    _write({"freq_hz": grid.freqs, f"f_{label}": spec.values}, args.out)


def cmd_dc(args):
    model = build_system(_system(args))
    grid = _grid(model, args)
    dc = directed_coherence(model, grid)
    cols = {"freq_hz": grid.freqs}
    for i in range(model.n):
        for j in range(model.n):
            cols[f"DC_{i + 1}to{j + 1}"] = dc[i][j].values
    _write(cols, args.out)


def cmd_decompose(args):
    model = build_system(_system(args))
    grid = _grid(model, args)
    j = args.receiver
    parts = spectral_decomposition(model, grid, j)
    cols = {"freq_hz": grid.freqs, f"S{j + 1}{j + 1}": cpsd(model, grid).diagonal()[:, j]}
    for i in range(model.n):
        cols[f"S_{j + 1}given{i + 1}"] = parts[i]
    _write(cols, args.out)


def cmd_experiment(args):
    cfg = load_config(args.config) if args.config else default_config(args.command)
    cfg.experiment = args.command
    for name, attr in (("seed", "seed"), ("T", "T"), ("realizations", "n_realizations"),
                       ("workers", "workers"), ("nfreq", "nfreq"), ("output_dir", "output_dir")):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, attr, value)
    if args.methods:
        cfg.methods = args.methods
    if args.orders:
        cfg.orders = args.orders
    if cfg.output_dir is None:
        cfg.output_dir = f"out/{args.command}"
    cfg.validate()
    results, written = run_experiment(cfg)
    if args.command == "fig1" and all(not s.valid_count.any() for s in results.values()):
        print("every realization failed", file=sys.stderr)
        return EXIT_NUMERIC
    for path in written:
        print(path)


def build_parser():
    parser = argparse.ArgumentParser(prog="freqgc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def system_args(p):
        p.add_argument("--config", help="JSON config whose 'system' is used")
        p.add_argument("--system", choices=sorted(PRESETS), default="fig1",
                       help="built-in system when no --config is given")
        p.add_argument("--nfreq", type=int, default=512)
        p.add_argument("--out", help="CSV output path (stdout if omitted)")

    p = sub.add_parser("simulate", help="simulate a realization of the system")
    system_args(p)
    p.add_argument("--T", type=int, default=500)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gc", help="conditional spectral Granger-Geweke causality")
    system_args(p)
    p.add_argument("--method", choices=("classic", "ss"), default="ss")
    p.add_argument("--order", type=int)
    p.add_argument("--reduced-order", type=int)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--sources", type=int, nargs="+", required=True)
    p.add_argument("--cond", type=int, nargs="*", default=[])
    p.add_argument("--data", help="CSV matrix (rows = samples, columns = channels)")
    p.add_argument("--fs", type=float, default=120.0, help="sampling rate of --data")
    p.set_defaults(func=cmd_gc)

    p = sub.add_parser("dc", help="squared directed coherence for every channel pair")
    system_args(p)
    p.set_defaults(func=cmd_dc)

    p = sub.add_parser("decompose", help="split a receiver spectrum by transmitter")
    system_args(p)
    p.add_argument("--receiver", type=int, required=True)
    p.set_defaults(func=cmd_decompose)

    for name, text in (("fig1", "Monte Carlo estimator comparison"),
                       ("fig2", "receiver-variant spectral decomposition")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config")
        p.add_argument("--seed", type=int)
        p.add_argument("--T", type=int)
        p.add_argument("--realizations", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--nfreq", type=int)
        p.add_argument("--methods", nargs="+", choices=("classic", "ss"))
        p.add_argument("--orders", type=int, nargs="+")
        p.add_argument("--output-dir")
        p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        code = args.func(args)
    except (InvalidSpec, UsageError, NonPosDefSigma, NonDiagonalSigma, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FreqGCError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return code or EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
