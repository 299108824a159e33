"""Python bindings for the streamrec reconstruction library."""

import json

from ._streamrec import (
    PacketBasis,
    StreamSolver,
    StreamrecError,
    build_lot,
    build_shift_invariant,
    epsilon_bound,
    flatness_beta,
    slepian_eigenvalues,
    solve_dense,
    theorem_constant,
)
from . import _streamrec

__all__ = [
    "PacketBasis",
    "StreamSolver",
    "StreamrecError",
    "build_lot",
    "build_shift_invariant",
    "epsilon_bound",
    "flatness_beta",
    "slepian_eigenvalues",
    "solve_dense",
    "theorem_constant",
    "preset_config",
    "simulate",
    "run_experiment",
]


def _as_text(config):
    if isinstance(config, str):
        return json.dumps({"name": config}) if not config.lstrip().startswith("{") else config
    return json.dumps(config)


def preset_config(name):
    """Preset experiment config as a dict."""
    return json.loads(_streamrec.preset_config(name))


def simulate(config):
    """Sample times and values for a preset name or config dict."""
    return _streamrec.simulate(_as_text(config))


def run_experiment(config, out_dir=""):
    """Runs an experiment and returns its summary dict; writes artifacts when out_dir is given."""
    return json.loads(_streamrec.run_experiment(_as_text(config), out_dir))
