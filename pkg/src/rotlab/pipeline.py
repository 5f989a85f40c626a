"""Full experiment: lift -> orbit -> rotation set -> slow limits -> deviation -> fine curve -> verdict."""
from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifier import EvidenceBundle, classify, consistency_audit, dehn_is_point
from .config import ExperimentConfig
from .deviation import deviation_profile, rational_deviation_scan
from .errors import HorizonTooLarge, InvalidInput, RotlabError
from .finecurve import LoopClass, graph_orbit_bound
from .lifts import detect_homotopy_class
from .orbit import dn_statistics, iterate_domain
from .rotation import dehn_rotation_interval, rotation_set_estimate, shape_classify
from .slow import blowup_search, dichotomy_report, excursions, good_limit_candidates, main_direction_rows, \
    normalized_shape

log = logging.getLogger(__name__)

STAGES = ("homotopy", "orbit", "rotation", "slow_limits", "deviation", "fine_curve", "verdict")


def jsonable(x):
    """Plain JSON data; non-finite floats become the strings "inf", "-inf", "nan"."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if x is None or isinstance(x, str):
        return x
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    return str(x)


@dataclass
class Report:
    data: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.data[key]

    def get(self, key, default=None):
        return self.data.get(key, default)

    @property
    def ok(self) -> bool:
        return not self.data.get("errors")

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 2

    def to_json(self, timings: bool = True) -> str:
        d = self.data if timings else {k: v for k, v in self.data.items() if k != "timings"}
        return json.dumps(d, sort_keys=True, indent=1, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls(json.loads(text))

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        return path

    def hash_matches(self) -> bool:
        from .config import ExperimentConfig as _C
        return _C(self.data["config"]).hash() == self.data["config_hash"]


class Pipeline:
    """Runs stages in order, accumulating evidence and report sections.

    A failing stage records an error and leaves its section null; stages that
    need its output are then skipped.
    """

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.m = cfg.map
        self.evidence = EvidenceBundle()
        self.series = None
        self.scan = None
        self.transverse_profile = None
        self.report = Report({
            "config": cfg.data, "config_hash": cfg.hash(), "label": cfg["label"],
            "homotopy": None, "d_n_summary": None, "rotation": None, "slow_limits": None,
            "deviation_scan": None, "fine_curve": None, "verdict": None, "audit": None,
            "series": {}, "warnings": [], "errors": [], "timings": {},
        })

    # -- plumbing
    def _stage(self, name, fn):
        t0 = time.perf_counter()
        try:
            fn()
        except RotlabError as exc:
            log.warning("stage %s failed: %s", name, exc)
            self.report.data["errors"].append({"stage": name, "type": type(exc).__name__, "message": str(exc)})
        finally:
            self.report.data["timings"][name] = round(time.perf_counter() - t0, 6)

    def _skip(self, name, why):
        self.report.data["warnings"].append(f"{name} skipped: {why}")

    @property
    def variant(self):
        hc = self.evidence.homotopy
        return None if hc is None else hc.variant

    # -- stages
    def homotopy(self):
        hc = detect_homotopy_class(self.m)
        self.evidence.homotopy = hc
        self.report.data["homotopy"] = hc.to_dict()

    def orbit(self):
        if self.variant is None:
            return self._skip("orbit", "no homotopy class")
        cfg = self.cfg
        try:
            s = iterate_domain(self.m, cfg["grid_res"], cfg["N"], cfg.x0)
        except HorizonTooLarge as exc:
            if exc.partial is None or exc.last_safe_n < 1:
                raise
            s = exc.partial
            self.report.data["warnings"].append(f"horizon truncated to n = {exc.last_safe_n}: {exc}")
        self.series = s
        stats = dn_statistics(s)
        stats["N_used"] = s.N
        stats["grid_diagonal"] = s.grid_diagonal
        self.report.data["d_n_summary"] = stats
        self.report.data["series"]["d_n"] = [float(v) for v in s.d]
        steps = cfg.stages["shape_steps"]
        shapes = []
        for n in sorted({max(1, round(s.N * j / steps)) for j in range(1, steps + 1)}):
            if n <= s.N and s.d[n] > 0:
                shapes.append({"n": n, "vertices": normalized_shape(s, n).shape.to_list()})
        self.report.data["series"]["shapes"] = shapes

    def rotation(self):
        s, t = self.series, self.cfg.tol
        if s is None:
            return self._skip("rotation", "no orbit")
        if self.variant == "Identity":
            est = rotation_set_estimate(s)
            shape = shape_classify(est, t["tol"], t["q_max"], t["tol_angle"])
            self.evidence.rotation = shape
            self.report.data["rotation"] = {"estimate": est.to_dict(), "shape": shape.to_dict()}
        elif self.variant == "DehnTwistConjugate":
            est = dehn_rotation_interval(s)
            point, tol = dehn_is_point(est, t["dehn_tol"])
            self.evidence.rotation = est
            self.evidence.dehn_tol = t["dehn_tol"]
            self.report.data["rotation"] = {"estimate": est.to_dict(),
                                            "shape": {"variant": "Point" if point else "Interval", "tol": tol}}
        else:
            self._skip("rotation", f"undefined for the {self.variant} class")

    def slow_limits(self):
        s, t = self.series, self.cfg.tol
        if s is None:
            return self._skip("slow_limits", "no orbit")
        cands = good_limit_candidates(s, t["R_min"], t["cluster_eps"], t["scale_fraction"])
        dich = dichotomy_report(cands, t["tol_angle"], t["dichotomy_q_max"], t["dichotomy_tol"])
        blow = blowup_search(s, t["R_min"], t["blowup_growth"], t["blowup_slope"])
        self.evidence.slow_dichotomy = dich
        self.evidence.blowup = blow
        self.report.data["slow_limits"] = {
            "candidates": [c.to_dict() for c in cands],
            "dichotomy": dich.to_dict(),
            "blowup": None if blow is None else blow.to_dict(),
            "excursions": [[e.n1, e.n2] for e in excursions(s, t["R_min"])],
            "R_min": t["R_min"],
        }
        self.report.data["series"]["main_direction"] = [list(r) for r in main_direction_rows(s, t["R_min"])]

    def deviation(self):
        cfg, t, st = self.cfg, self.cfg.tol, self.cfg.stages
        N = st["deviation_N"] or cfg["N"]
        kw = {k: t[k] for k in ("unbounded_slope", "growth_ratio", "bounded_slope", "bounded_ratio", "noise_floor")}
        if self.variant == "Identity":
            scan = rational_deviation_scan(self.m, t["scan_q_max"], st["deviation_grid"], N, t["window"], **kw)
            self.scan = self.evidence.deviation_scan = scan
            self.report.data["deviation_scan"] = scan.to_dict()
            self.report.data["series"]["deviation"] = [
                {"p": r.direction.p, "q": r.direction.q, "dev": [float(x) for x in r.profile.dev]}
                for r in scan.rows if r.profile is not None]
        elif self.variant == "DehnTwistConjugate":
            u = self.evidence.homotopy.transverse
            prof = deviation_profile(self.m, st["deviation_grid"], N, u, window=t["window"], **kw)
            self.transverse_profile = prof
            self.evidence.transverse_deviation = prof.verdict
            self.report.data["deviation_scan"] = {
                "transverse": u.tolist(), "rho_component": prof.rho_component,
                "dev_N": float(prof.dev[-1]), "verdict": prof.verdict.to_dict()}
            self.report.data["series"]["deviation"] = [
                {"p": int(u[0]), "q": int(u[1]), "dev": [float(x) for x in prof.dev]}]
        else:
            self._skip("deviation", f"undefined for the {self.variant} class")

    def fine_curve(self):
        st, t = self.cfg.stages, self.cfg.tol
        if self.variant == "Identity":
            bounded = self.scan.bounded_directions() if self.scan is not None else []
            loop = LoopClass(bounded[0].p, bounded[0].q) if bounded else LoopClass(0, 1)
        elif self.variant == "DehnTwistConjugate":
            a1, a2 = self.evidence.homotopy.invariant
            loop = LoopClass(-a2, a1)
        else:
            return self._skip("fine_curve", f"no invariant loop in the {self.variant} class")
        kw = {k: t[k] for k in ("unbounded_slope", "growth_ratio", "bounded_slope", "bounded_ratio", "noise_floor")}
        ob = graph_orbit_bound(self.m, loop, st["fine_curve_N"], st["fine_curve_samples"],
                               window=t["window"], min_N=min(64, st["fine_curve_N"]), **kw)
        self.evidence.fine_curve = ob
        self.report.data["fine_curve"] = {"loop": [loop.p, loop.q], **ob.to_dict()}

    def verdict(self):
        v = classify(self.evidence)
        self.report.data["verdict"] = v.to_dict()
        self.report.data["audit"] = consistency_audit(self.evidence, v)

    def run(self, stages=STAGES) -> Report:
        unknown = set(stages) - set(STAGES)
        if unknown:
            raise InvalidInput(f"unknown stages {sorted(unknown)}")
        for name in STAGES:
            if name in stages:
                self._stage(name, getattr(self, name))
        self.report.data = jsonable(self.report.data)
        return self.report


def run_pipeline(cfg: ExperimentConfig, stages=STAGES) -> Report:
    return Pipeline(cfg).run(stages)
