"""Builtin experiment configurations, one per qualitatively different action."""
from __future__ import annotations

import copy

from .config import ExperimentConfig
from .errors import InvalidInput

# phi(t) = (1 - cos 2 pi t) / 4, range [0, 1/2]
_SHEAR_PHI = {"const": 0.25, "cos": [-0.25]}
# phi(t) = (1 - cos 2 pi t) / 2, range [0, 1]
_FULL_PHI = {"const": 0.5, "cos": [-0.5]}

BUILTINS = {
    "translation": {
        "label": "translation",
        "map": {"family": "translation", "rho": ["1/2", "1/3"]},
        "grid_res": 128, "N": 512,
    },
    "shear": {
        "label": "shear",
        "map": {"family": "shear_x", "phi": _SHEAR_PHI},
        "grid_res": 256, "N": 1000,
        "stages": {"deviation_N": 1000},
    },
    "twist": {
        "label": "twist",
        "map": {"family": "twist", "k": 1, "alpha": 0.3},
        "grid_res": 128, "N": 500,
    },
    "anosov": {
        "label": "anosov",
        "map": {"family": "linear", "A": [[2, 1], [1, 1]]},
        "grid_res": 128, "N": 25,
    },
    "interior": {
        "label": "interior",
        "map": {"family": "composite", "maps": [{"family": "shear_y", "phi": _FULL_PHI},
                                                {"family": "shear_x", "phi": _FULL_PHI}]},
        "grid_res": 64, "N": 200,
    },
    "dehn-hyperbolic": {
        "label": "dehn-hyperbolic",
        "map": {"family": "composite", "maps": [{"family": "shear_y", "phi": {"sin": [1.0]}},
                                                {"family": "twist", "k": 1, "alpha": 0}]},
        "grid_res": 64, "N": 200,
    },
}


def builtin_config(name: str, **overrides) -> ExperimentConfig:
    if name not in BUILTINS:
        raise InvalidInput(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    d = copy.deepcopy(BUILTINS[name])
    d.update(overrides)
    return ExperimentConfig(d)


def builtin_map(name: str):
    return builtin_config(name).map
