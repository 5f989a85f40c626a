"""Experiment configuration: JSON schema, defaults, and map construction."""
from __future__ import annotations

import copy
import hashlib
import json
from fractions import Fraction
from pathlib import Path

import jsonschema

from .errors import InvalidInput
from .lifts import FourierSeries, LiftMap, compose, make_linear, make_shear_x, make_shear_y, make_translation, \
    make_twist, shift_lift

_NUM = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*-?\d+\s*(/\s*\d+\s*)?$"}]}
_POS = {"type": "number", "exclusiveMinimum": 0}
_FOURIER = {
    "type": "object",
    "properties": {"const": _NUM, "cos": {"type": "array", "items": _NUM}, "sin": {"type": "array", "items": _NUM}},
    "additionalProperties": False,
}

MAP_SCHEMA = {
    "type": "object",
    "required": ["family"],
    "properties": {
        "family": {"enum": ["translation", "shear_x", "shear_y", "twist", "linear", "composite"]},
        "rho": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "phi": _FOURIER,
        "psi": _FOURIER,
        "k": {"type": "integer"},
        "alpha": _NUM,
        "A": {"type": "array", "minItems": 2, "maxItems": 2,
              "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}},
        "maps": {"type": "array", "minItems": 1, "items": {"$ref": "#/definitions/map"}},
        "lift_shift": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "label": {"type": "string"},
    },
    "additionalProperties": False,
}

TOLERANCE_DEFAULTS = {
    "tol": None,              # rotation shape tolerance; None means 5 (sqrt2/n + gap)
    "tol_angle": 0.01,        # radians
    "q_max": 32,              # rational directions / points for the rotation shape
    "dichotomy_q_max": 5,
    "dichotomy_tol": 0.05,
    "R_min": 20.0,
    "cluster_eps": 0.05,
    "scale_fraction": 0.5,
    "scan_q_max": 3,
    "window": 0.5,
    "unbounded_slope": 0.25,
    "growth_ratio": 2.0,
    "bounded_slope": 0.05,
    "bounded_ratio": 2.0,
    "noise_floor": 1e-7,
    "blowup_growth": 10.0,
    "blowup_slope": 0.2,
    "dehn_tol": None,
}

STAGE_DEFAULTS = {
    "deviation_grid": 64,
    "deviation_N": None,      # None means N
    "fine_curve_N": 100,
    "fine_curve_samples": 256,
    "shape_steps": 4,
}

CONFIG_SCHEMA = {
    "type": "object",
    "definitions": {"map": MAP_SCHEMA},
    "required": ["map"],
    "properties": {
        "label": {"type": "string"},
        "map": {"$ref": "#/definitions/map"},
        "grid_res": {"type": "integer", "minimum": 8},
        "N": {"type": "integer", "minimum": 1},
        "x0": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "seed": {"type": "integer", "minimum": 0},
        "tolerances": {
            "type": "object",
            "properties": {k: ({"oneOf": [_POS, {"type": "null"}]} if v is None else
                               {"type": "integer", "minimum": 1} if isinstance(v, int) and not isinstance(v, bool)
                               else _POS) for k, v in TOLERANCE_DEFAULTS.items()},
            "additionalProperties": False,
        },
        "stages": {
            "type": "object",
            "properties": {
                "deviation_grid": {"type": "integer", "minimum": 8},
                "deviation_N": {"oneOf": [{"type": "integer", "minimum": 1}, {"type": "null"}]},
                "fine_curve_N": {"type": "integer", "minimum": 0},
                "fine_curve_samples": {"type": "integer", "minimum": 2},
                "shape_steps": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "outputs": {
            "type": "object",
            "properties": {"report": {"type": "string"}, "csv_dir": {"type": "string"},
                           "plot_dir": {"type": "string"}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

SURFACE_SCHEMA = {
    "type": "object",
    "required": ["surface", "slope"],
    "properties": {
        "label": {"type": "string"},
        "surface": {"type": "object", "required": ["k", "right", "up"],
                    "properties": {"k": {"type": "integer", "minimum": 1},
                                   "right": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                                   "up": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
                    "additionalProperties": False},
        "slope": _NUM,
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "outputs": {"type": "object"},
    },
    "additionalProperties": False,
}


def number(v) -> float:
    """A config number: JSON number or a string "a/b"."""
    if isinstance(v, str):
        try:
            return float(Fraction(v.replace(" ", "")))
        except (ValueError, ZeroDivisionError):
            raise InvalidInput(f"not a rational number: {v!r}") from None
    return float(v)


def fourier(spec) -> FourierSeries:
    spec = spec or {}
    return FourierSeries(number(spec.get("const", 0)), [number(a) for a in spec.get("cos", [])],
                         [number(b) for b in spec.get("sin", [])])


def _need(spec, key):
    if key not in spec:
        raise InvalidInput(f"map family {spec['family']!r} needs {key!r}")
    return spec[key]


def build_map(spec: dict) -> LiftMap:
    fam = spec["family"]
    if fam == "translation":
        m = make_translation([number(c) for c in _need(spec, "rho")])
    elif fam == "shear_x":
        m = make_shear_x(fourier(_need(spec, "phi")))
    elif fam == "shear_y":
        m = make_shear_y(fourier(_need(spec, "phi")))
    elif fam == "twist":
        psi = fourier(spec["psi"]) if "psi" in spec else None
        m = make_twist(_need(spec, "k"), number(spec.get("alpha", 0)), psi)
    elif fam == "linear":
        m = make_linear(_need(spec, "A"))
    else:
        m = compose(*[build_map(s) for s in _need(spec, "maps")])
    if "lift_shift" in spec:
        m = shift_lift(m, spec["lift_shift"])
    if "label" in spec:
        m.label = spec["label"]
    return m


def _validate(obj, schema):
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidInput(f"invalid config at {where}: {exc.message}") from None


class ExperimentConfig:
    """A validated configuration with every default filled in."""

    def __init__(self, obj: dict):
        _validate(obj, CONFIG_SCHEMA)
        d = copy.deepcopy(obj)
        d.setdefault("label", d["map"].get("label", d["map"]["family"]))
        d.setdefault("grid_res", 128)
        d.setdefault("N", 256)
        d.setdefault("x0", [0.5, 0.5])
        d.setdefault("seed", 0)
        d["tolerances"] = {**TOLERANCE_DEFAULTS, **d.get("tolerances", {})}
        d["stages"] = {**STAGE_DEFAULTS, **d.get("stages", {})}
        d["outputs"] = {"report": "report.json", "csv_dir": "csv", "plot_dir": "plots", **d.get("outputs", {})}
        x0 = [number(c) for c in d["x0"]]
        if not all(0 < c < 1 for c in x0):
            raise InvalidInput("x0 must lie in the open unit square")
        self.data = d
        self.map = build_map(d["map"])

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InvalidInput(f"cannot read config {path}: {exc}") from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"config {path} is not valid JSON: {exc}") from None
        return cls(obj)

    def override(self, grid=None, horizon=None, seed=None) -> "ExperimentConfig":
        d = copy.deepcopy(self.data)
        if grid is not None:
            d["grid_res"] = grid
        if horizon is not None:
            d["N"] = horizon
        if seed is not None:
            d["seed"] = seed
        return ExperimentConfig(d)

    def __getitem__(self, key):
        return self.data[key]

    @property
    def tol(self) -> dict:
        return self.data["tolerances"]

    @property
    def stages(self) -> dict:
        return self.data["stages"]

    @property
    def x0(self):
        return [number(c) for c in self.data["x0"]]

    def canonical(self) -> str:
        return json.dumps(self.data, sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def load_surface_config(obj) -> dict:
    _validate(obj, SURFACE_SCHEMA)
    return {"surface": obj["surface"], "slope": number(obj["slope"]), "trials": obj.get("trials", 64),
            "seed": obj.get("seed", 0), "label": obj.get("label", "surface")}
