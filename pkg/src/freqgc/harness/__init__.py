"""Experiment harness: configuration, Monte Carlo runs and output files."""

from .config import (
    FIG1_DIRECTIONS,
    FIG1_SYSTEM,
    FIG2_SYSTEM,
    ExperimentConfig,
    build_system,
    default_config,
    load_config,
)
from .io import emit_csv, emit_plot, read_csv, write_run_echo
from .montecarlo import Fig2Variant, McSummary, percentile_summary, run_fig1, run_fig2
from .runner import run_experiment
