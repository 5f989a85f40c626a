"""Command line entry point.

Exit codes: 0 ok, 1 invalid config, 2 runtime error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .config import ExperimentConfig, load_surface_config
from .errors import InvalidInput, RotlabError
from .fixtures import BUILTINS, builtin_config
from .pipeline import STAGES, Pipeline, jsonable
from .plots import KINDS, emit_plot_data
from .squaretiled import SquareTiledSurface, min_crossing_length

log = logging.getLogger("rotlab")

VERB_STAGES = {
    "iterate": ("homotopy", "orbit"),
    "rotation-set": ("homotopy", "orbit", "rotation"),
    "slow-limits": ("homotopy", "orbit", "slow_limits"),
    "deviation": ("homotopy", "deviation"),
    "fine-curve": ("homotopy", "deviation", "fine_curve"),
    "classify": STAGES,
    "report": STAGES,
}
VERB_PLOTS = {
    "iterate": ("d_n",),
    "rotation-set": ("rotation",),
    "slow-limits": ("shapes",),
    "deviation": ("deviation",),
    "report": KINDS,
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rotlab", description="Rotation sets and fine-curve-graph actions of torus maps.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb in (*VERB_STAGES, "square-tiled"):
        p = sub.add_parser(verb)
        p.add_argument("--config", required=True,
                       help="JSON config path, or builtin:<name> with name in " + ", ".join(sorted(BUILTINS)))
        p.add_argument("--out", default=None, help="output directory (default: no files written)")
        p.add_argument("--seed", type=int, default=None)
        if verb != "square-tiled":
            p.add_argument("--grid", type=int, default=None, help="grid resolution override")
            p.add_argument("--horizon", type=int, default=None, help="N override")
    return ap


def _load(args) -> ExperimentConfig:
    if args.config.startswith("builtin:"):
        name = args.config.split(":", 1)[1]
        if name not in BUILTINS:
            raise InvalidInput(f"unknown builtin {name!r}")
        cfg = builtin_config(name)
    else:
        cfg = ExperimentConfig.load(args.config)
    if args.grid is not None or args.horizon is not None or args.seed is not None:
        cfg = cfg.override(args.grid, args.horizon, args.seed)
    return cfg


def _summary(verb: str, data: dict) -> dict:
    keys = {
        "iterate": ("homotopy", "d_n_summary"),
        "rotation-set": ("homotopy", "rotation"),
        "slow-limits": ("homotopy", "slow_limits"),
        "deviation": ("homotopy", "deviation_scan"),
        "fine-curve": ("homotopy", "fine_curve"),
        "classify": ("homotopy", "verdict", "audit"),
        "report": ("homotopy", "verdict", "audit"),
    }[verb]
    out = {k: data.get(k) for k in ("label", "config_hash", *keys)}
    if verb == "slow-limits" and out["slow_limits"]:
        # candidate polygons are in the written files; keep stdout readable
        sl = out["slow_limits"]
        out["slow_limits"] = {"dichotomy": sl["dichotomy"], "n_candidates": len(sl["candidates"]),
                              "blowup": sl["blowup"] is not None, "excursions": sl["excursions"]}
    out["warnings"], out["errors"] = data["warnings"], data["errors"]
    return out


def _write_series(pipe: Pipeline, out: Path):
    s = pipe.series
    if s is None:
        return
    with (out / "series.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "d_n", "base_x", "base_y"])
        w.writerows((n, repr(d), repr(x), repr(y)) for n, d, x, y in s.summary_rows())


def _write_fine_curve(pipe: Pipeline, out: Path):
    ob = pipe.evidence.fine_curve
    if ob is None:
        return
    with (out / "fine_curve.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "count", "distance_bound"])
        w.writerows(ob.rows())


def _run_verb(args) -> int:
    cfg = _load(args)
    pipe = Pipeline(cfg)
    report = pipe.run(VERB_STAGES[args.verb])
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        name = cfg["outputs"]["report"] if args.verb == "report" else f"{args.verb}.json"
        report.save(out / name)
        csv_dir = out / cfg["outputs"]["csv_dir"]
        csv_dir.mkdir(parents=True, exist_ok=True)
        _write_series(pipe, csv_dir)
        _write_fine_curve(pipe, csv_dir)
        for kind in VERB_PLOTS.get(args.verb, ()):
            try:
                emit_plot_data(report, kind, out / cfg["outputs"]["plot_dir"])
            except RotlabError as exc:
                log.info("plot %s not written: %s", kind, exc)
    print(json.dumps(_summary(args.verb, report.data), sort_keys=True, indent=1))
    return report.exit_code


def _run_square_tiled(args) -> int:
    path = Path(args.config)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read surface config {path}: {exc}") from None
    c = load_surface_config(obj)
    surf = SquareTiledSurface.from_json(c["surface"])
    seed = c["seed"] if args.seed is None else args.seed
    try:
        res = min_crossing_length(surf, c["slope"], trials=c["trials"], seed=seed)
        data = {"label": c["label"], "surface": json.loads(surf.to_json()), "slope": c["slope"], "seed": seed,
                "result": res.to_dict(), "errors": []}
        code = 0
    except RotlabError as exc:
        data = {"label": c["label"], "slope": c["slope"], "seed": seed, "result": None,
                "errors": [{"type": type(exc).__name__, "message": str(exc)}]}
        code = 1 if isinstance(exc, InvalidInput) else 2
    text = json.dumps(jsonable(data), sort_keys=True, indent=1)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "square-tiled.json").write_text(text + "\n")
    print(text)
    return code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.verb == "square-tiled":
            return _run_square_tiled(args)
        return _run_verb(args)
    except InvalidInput as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1
    except RotlabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
