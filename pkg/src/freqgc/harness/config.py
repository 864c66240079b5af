"""Experiment configuration, default systems and JSON (de)serialization.

Config schema (JSON object; every field optional unless noted)::

    {
      "experiment": "fig1" | "fig2",
      "system": {                      # pole placement ...
        "fs": 120.0,
        "nodes": [[[f0, rho], ...], ...],   # pole pairs per channel
        "couplings": [[src, dst, lag, gain], ...],   # 0-based channels
        "sigma_diag": [1.0, ...]
      },
      # ... or explicit coefficients:
      # "system": {"fs": 120.0, "coeffs": [[[...]]], "sigma": [[...]]},
      "T": 500, "burn_in": 1000, "n_realizations": 100,
      "orders": [3, 20],               # classic estimator orders
      "reduced_order": null,           # classic reduced order; null = same as full
      "ss_order": null,                # order of the fit behind the SS route; null = true order
      "nfreq": 512, "seed": 0, "methods": ["classic", "ss"],
      "directions": [[target, [sources], [cond]], ...],   # fig1 only
      "receiver_f0": [10, 30, 50],     # fig2 only, replaces channel 1 resonances
      "output_dir": "out/fig1", "workers": 1
    }
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ..errors import InvalidSpec, UnstableSystem
from ..var import PolePlacementSpec, VarModel, build_from_poles

DEFAULT_FS = 120.0

FIG1_SYSTEM = {
    "fs": DEFAULT_FS,
    "nodes": [[[40.0, 0.9]], [[10.0, 0.7]], [[50.0, 0.8]]],
    "couplings": [[0, 1, 1, -0.356], [1, 2, 3, 0.5]],
    "sigma_diag": [1.0, 1.0, 1.0],
}

# (target, sources, conditioning): 1->2|3, 2->3|1, 3->1|2
FIG1_DIRECTIONS = [[1, [0], [2]], [2, [1], [0]], [0, [2], [1]]]

FIG2_SYSTEM = {
    "fs": DEFAULT_FS,
    "nodes": [[[50.0, 0.95]], [[10.0, 0.95]]],
    "couplings": [[0, 1, 1, 0.5]],
    "sigma_diag": [1.0, 1.0],
}

METHODS = ("classic", "ss")


@dataclass
class ExperimentConfig:
    experiment: str = "fig1"
    system: dict = field(default_factory=lambda: copy.deepcopy(FIG1_SYSTEM))
    T: int = 500
    burn_in: int = 1000
    n_realizations: int = 100
    orders: list = field(default_factory=lambda: [3, 20])
    reduced_order: int | None = None
    ss_order: int | None = None
    nfreq: int = 512
    seed: int | None = None
    methods: list = field(default_factory=lambda: list(METHODS))
    directions: list = field(default_factory=lambda: copy.deepcopy(FIG1_DIRECTIONS))
    receiver_f0: list = field(default_factory=lambda: [10.0, 30.0, 50.0])
    output_dir: str | None = None
    workers: int = 1

    def validate(self):
        if self.experiment not in ("fig1", "fig2"):
            raise InvalidSpec(f"unknown experiment {self.experiment!r}")
        if self.n_realizations < 1:
            raise InvalidSpec("n_realizations must be >= 1")
        if self.T < 1 or self.burn_in < 0:
            raise InvalidSpec("T must be >= 1 and burn_in >= 0")
        if self.nfreq < 2:
            raise InvalidSpec("nfreq must be >= 2")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise InvalidSpec(f"methods must be a non-empty subset of {METHODS}, got {self.methods}")
        if "classic" in self.methods and not self.orders:
            raise InvalidSpec("orders must be non-empty when the classic method is requested")
        if any(int(p) < 1 for p in self.orders):
            raise InvalidSpec("orders must be >= 1")
        if self.workers < 1:
            raise InvalidSpec("workers must be >= 1")
        if self.seed is None:
            raise InvalidSpec("a master seed is required")
        build_system(self.system)
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise InvalidSpec(f"unknown config fields: {sorted(extra)}")
        cfg = cls(**copy.deepcopy(data))
        if "system" not in data and cfg.experiment == "fig2":
            cfg.system = copy.deepcopy(FIG2_SYSTEM)
        return cfg


def default_config(experiment="fig1", **overrides):
    base = {"experiment": experiment}
    base.update(overrides)
    return ExperimentConfig.from_dict(base)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSpec(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidSpec("config must be a JSON object")
    return ExperimentConfig.from_dict(data)


def pole_spec(system):
    return PolePlacementSpec(
        fs=float(system.get("fs", DEFAULT_FS)),
        nodes=[[tuple(pp) for pp in node] for node in system["nodes"]],
        couplings=[(int(s), int(d), int(l), float(g)) for s, d, l, g in system.get("couplings", [])],
        sigma_diag=system.get("sigma_diag"),
    )


def build_system(system):
    """VarModel from a system dict (pole placement or explicit coefficients)."""
    if not isinstance(system, dict):
        raise InvalidSpec("system must be an object")
    try:
        if "coeffs" in system:
            model = VarModel(np.array(system["coeffs"], dtype=float),
                             np.array(system["sigma"], dtype=float),
                             float(system.get("fs", DEFAULT_FS)))
            model.check_stable()
            return model
        return build_from_poles(pole_spec(system))
    except UnstableSystem as exc:
        raise InvalidSpec(f"system is not stable: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"malformed system description: {exc}") from exc


def with_receiver(system, f0, receiver=1):
    """Copy of a pole-placement system with the receiver's resonances moved to `f0`."""
    out = copy.deepcopy(system)
    out["nodes"][receiver] = [[float(f0), pp[1]] for pp in out["nodes"][receiver]]
    return out
