"""CSV, SVG and run-echo output for experiment results."""

from __future__ import annotations

import csv
import json
import os
from collections.abc import Mapping

import numpy as np

from ..errors import InvalidSpec
from .montecarlo import Fig2Variant, McSummary

FLOAT_FORMAT = "{:.12g}"


def _fmt(v):
    return "nan" if not np.isfinite(v) else FLOAT_FORMAT.format(float(v))


def summary_columns(summaries):
    """Ordered ``{column: values}`` for summaries sharing one grid."""
    summaries = list(summaries)
    if not summaries:
        raise InvalidSpec("nothing to write: empty summary list")
    grid = summaries[0].grid
    cols = {"freq_hz": grid.freqs}
    for s in summaries:
        if s.grid != grid:
            raise InvalidSpec("summaries in one file must share a frequency grid")
        key = f"f_{s.label}"
        cols[f"{key}_median"] = s.median
        cols[f"{key}_p05"] = s.p05
        cols[f"{key}_p95"] = s.p95
        cols[f"{key}_valid"] = s.valid_count
        if s.truth is not None:
            cols[f"{key}_truth"] = s.truth.values
    return cols


def variant_columns(variant):
    return {
        "freq_hz": variant.grid.freqs,
        "S11": variant.S11,
        "S22": variant.S22,
        "DC_1to2": variant.dc_1to2,
        "S_2given1": variant.S2_given_1,
        "S_2given2": variant.S2_given_2,
    }


def to_columns(obj):
    if isinstance(obj, Fig2Variant):
        return variant_columns(obj)
    if isinstance(obj, McSummary):
        return summary_columns([obj])
    if isinstance(obj, Mapping):
        if not obj:
            raise InvalidSpec("nothing to write: empty column mapping")
        return dict(obj)
    return summary_columns(obj)


def emit_csv(obj, path):
    """Write one row per frequency bin, preceded by a header row.

    `obj` is an McSummary, a list of McSummary sharing one grid, a
    Fig2Variant, or a mapping of column name to values (first column should
    be ``freq_hz``). Values carry 12 significant digits; lines end in LF.
    Nothing is written if `obj` is empty.
    """
    cols = to_columns(obj)
    names = list(cols)
    arrays = [np.asarray(cols[k], dtype=float) for k in names]
    nrows = len(arrays[0])
    if any(len(a) != nrows for a in arrays):
        raise InvalidSpec("all columns must have the same length")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*arrays):
            writer.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    """Parse a file written by :func:`emit_csv` into ``{column: ndarray}``."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    names, body = rows[0], np.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))
    return {name: body[:, k] for k, name in enumerate(names)}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "freqgc"
    return plt


def _plot_summary(ax, s):
    f = s.grid.freqs
    ax.fill_between(f, s.p05, s.p95, color="tab:blue", alpha=0.3, lw=0, gid="band")
    ax.plot(f, s.median, color="tab:blue", lw=1.2, label="median")
    if s.truth is not None:
        ax.plot(f, s.truth.values, color="tab:red", lw=1.2, label="truth")
    ax.set_title(f"{s.method} f_{s.label}", fontsize=8)
    ax.set_xlabel("Hz")
    ax.set_ylabel("nats")


def _plot_variant(axes, v):
    f = v.grid.freqs
    axes[0].plot(f, v.S11, color="tab:green")
    axes[0].set_ylabel("power/Hz")
    axes[0].set_title("S11", fontsize=8)
    axes[1].plot(f, v.S22, color="tab:purple", label="S22")
    axes[1].plot(f, v.S2_given_1, color="tab:green", label="S2|1")
    axes[1].plot(f, v.S2_given_2, color="tab:orange", label="S2|2")
    axes[1].set_title(f"receiver at {v.receiver_f0:g} Hz", fontsize=8)
    axes[1].legend(fontsize=6)
    axes[2].plot(f, v.dc_1to2, color="tab:green")
    axes[2].set_ylim(0, 1)
    axes[2].set_title("|DC 1->2|^2", fontsize=8)
    for ax in axes:
        ax.set_xlabel("Hz")


def emit_plot(obj, path):
    """Render summaries (one panel each, with percentile band) or receiver variants to SVG.

    A list of Fig2Variant gives one row of three panels per variant; those
    curves are model-level, so no band is drawn.
    """
    plt = _pyplot()
    if isinstance(obj, (McSummary, Fig2Variant)):
        obj = [obj]
    items = list(obj.values()) if isinstance(obj, Mapping) else list(obj)
    if not items:
        raise InvalidSpec("nothing to plot")
    if all(isinstance(v, Fig2Variant) for v in items):
        fig, axes = plt.subplots(len(items), 3, figsize=(9, 2.6 * len(items)), squeeze=False)
        for row, v in zip(axes, items):
            _plot_variant(row, v)
    else:
        methods = list(dict.fromkeys(s.method for s in items))
        labels = list(dict.fromkeys(s.label for s in items))
        fig, axes = plt.subplots(len(methods), len(labels),
                                 figsize=(3.2 * len(labels), 2.6 * len(methods)), squeeze=False)
        for s in items:
            _plot_summary(axes[methods.index(s.method)][labels.index(s.label)], s)
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def write_run_echo(cfg, output_dir, extra=None):
    from .. import __version__

    payload = {"config": cfg.to_dict(), "freqgc_version": __version__}
    if extra:
        payload.update(extra)
    path = os.path.join(output_dir, "run.json")
    os.makedirs(output_dir, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
