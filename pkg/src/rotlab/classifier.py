"""Elliptic / parabolic / hyperbolic verdicts from collected evidence.

The decision tree consumes only discrete, tolerance-tagged evidence (shapes,
verdicts); every applied rule is recorded with the evidence fields it used.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .deviation import ScanTable, Verdict
from .errors import MissingEvidence
from .finecurve import OrbitBound
from .geometry import canonical_pair
from .lifts import HomotopyClass
from .rotation import RotationSetEstimate, RotationSetShape, default_tol
from .slow import DichotomyVerdict, RenormalizedCandidate

# rule id -> the case it implements
RULES = {
    "anosov->hyperbolic": "some iterate is homotopic to an Anosov map",
    "other-class->inconclusive": "finite-order homotopy class, no rule applies",
    "identity.interior->hyperbolic": "rotation set with nonempty interior",
    "identity.segment.irrational->parabolic": "segment of irrational direction",
    "identity.segment.rational-through-rational-point->elliptic":
        "segment of rational direction passing through a rational point",
    "identity.segment.rational-missing-rational-points->parabolic":
        "segment of rational direction avoiding rational points",
    "identity.point.bounded-rational-deviation->elliptic":
        "pseudo-rotation with bounded deviation from some rational direction",
    "identity.point.unbounded-rational-deviation->parabolic":
        "pseudo-rotation with no bounded rational deviation",
    "dehn.interval->hyperbolic": "Dehn twist class, nontrivial vertical rotation interval",
    "dehn.point.bounded-vertical->elliptic": "Dehn twist class, vertical rotation point, bounded vertical deviation",
    "dehn.point.unbounded-vertical->parabolic": "Dehn twist class, vertical rotation point, unbounded vertical deviation",
    "crosscheck.non-elliptic-witness->inconclusive":
        "irrational-segment limit or unit-disk blow-up forbids an elliptic action",
}


@dataclass
class EvidenceBundle:
    homotopy: Optional[HomotopyClass] = None
    rotation: object = None  # RotationSetShape (identity) or RotationSetEstimate (Dehn)
    deviation_scan: Optional[ScanTable] = None
    transverse_deviation: Optional[Verdict] = None
    slow_dichotomy: Optional[DichotomyVerdict] = None
    blowup: Optional[RenormalizedCandidate] = None
    fine_curve: Optional[OrbitBound] = None
    dehn_tol: Optional[float] = None


@dataclass
class ClassificationVerdict:
    action: str  # Elliptic | Parabolic | Hyperbolic | Inconclusive
    rationale: list = field(default_factory=list)
    caveats: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)

    def to_dict(self):
        return {"action": self.action, "rationale": self.rationale, "caveats": self.caveats,
                "parameters": self.parameters}


def _need(e: EvidenceBundle, name: str):
    val = getattr(e, name)
    if val is None:
        raise MissingEvidence(name)
    return val


def _step(rule: str, evidence: list, detail: str = "") -> dict:
    return {"rule": rule, "case": RULES[rule], "evidence": evidence, "detail": detail}


def dehn_is_point(est: RotationSetEstimate, tol: Optional[float] = None) -> tuple[bool, float]:
    lo, hi = est.interval
    if tol is None:
        tol = default_tol(est)
    return (hi - lo) <= tol, tol


def _identity(e: EvidenceBundle, out: ClassificationVerdict):
    shape = _need(e, "rotation")
    if not isinstance(shape, RotationSetShape):
        raise MissingEvidence("rotation (identity-class shape)")
    out.parameters["rotation"] = {"tol": shape.tol, "q_max": shape.q_max, "tol_angle": shape.tol_angle}
    if shape.variant == "Interior":
        out.action = "Hyperbolic"
        out.rationale.append(_step("identity.interior->hyperbolic", ["rotation"], f"area {shape.area:.4g}"))
    elif shape.variant == "Segment":
        if shape.rational_direction is None:
            out.action = "Parabolic"
            out.rationale.append(_step("identity.segment.irrational->parabolic", ["rotation"],
                                       f"direction {shape.direction.angle:.6f} rad"))
        elif shape.passes_rational_point:
            out.action = "Elliptic"
            rd, rp = shape.rational_direction, shape.rational_point
            out.rationale.append(_step("identity.segment.rational-through-rational-point->elliptic", ["rotation"],
                                       f"direction ({rd.p}, {rd.q}) through ({rp[0]}, {rp[1]})"))
        else:
            out.action = "Parabolic"
            out.rationale.append(_step("identity.segment.rational-missing-rational-points->parabolic", ["rotation"],
                                       "no rational point of bounded denominator near the segment"))
            out.caveats.append("franks-misiurewicz: this rotation set is conjectured never to occur")
    else:
        scan = _need(e, "deviation_scan")
        out.parameters["deviation_scan"] = scan.parameters
        bounded = scan.bounded_directions()
        if bounded:
            out.action = "Elliptic"
            d = bounded[0]
            out.rationale.append(_step("identity.point.bounded-rational-deviation->elliptic",
                                       ["rotation", "deviation_scan"], f"bounded along ({d.p}, {d.q})"))
        else:
            out.action = "Parabolic"
            out.rationale.append(_step("identity.point.unbounded-rational-deviation->parabolic",
                                       ["rotation", "deviation_scan"], "no rational direction is bounded"))
            if any(r.verdict is None or r.verdict.kind == "Inconclusive" for r in scan.rows):
                out.caveats.append("some rational directions were inconclusive")


def _dehn(e: EvidenceBundle, out: ClassificationVerdict):
    est = _need(e, "rotation")
    if not isinstance(est, RotationSetEstimate) or est.interval is None:
        raise MissingEvidence("rotation (Dehn-class interval)")
    point, tol = dehn_is_point(est, e.dehn_tol)
    out.parameters["rotation"] = {"tol": tol}
    lo, hi = est.interval
    if not point:
        out.action = "Hyperbolic"
        out.rationale.append(_step("dehn.interval->hyperbolic", ["rotation"], f"interval [{lo:.6g}, {hi:.6g}]"))
        return
    v = _need(e, "transverse_deviation")
    out.parameters["transverse_deviation"] = v.parameters
    if v.bounded:
        out.action = "Elliptic"
        out.rationale.append(_step("dehn.point.bounded-vertical->elliptic", ["rotation", "transverse_deviation"],
                                   f"sup deviation {v.sup:.4g}"))
    else:
        out.action = "Parabolic"
        out.rationale.append(_step("dehn.point.unbounded-vertical->parabolic", ["rotation", "transverse_deviation"],
                                   f"deviation verdict {v.kind}"))
        if v.kind == "Inconclusive":
            out.caveats.append("vertical deviation verdict was inconclusive")


def classify(e: EvidenceBundle) -> ClassificationVerdict:
    hc = _need(e, "homotopy")
    out = ClassificationVerdict("Inconclusive")
    out.parameters["homotopy"] = hc.variant
    if hc.variant == "Anosov":
        out.action = "Hyperbolic"
        out.rationale.append(_step("anosov->hyperbolic", ["homotopy"], f"matrix {hc.matrix.tolist()}"))
        return out
    if hc.variant == "Other":
        out.rationale.append(_step("other-class->inconclusive", ["homotopy"], f"matrix {hc.matrix.tolist()}"))
        return out
    if hc.variant == "Identity":
        _identity(e, out)
    else:
        _dehn(e, out)
    dich = _need(e, "slow_dichotomy")
    out.parameters["slow_dichotomy"] = dich.parameters
    if e.blowup is not None:
        out.parameters["blowup"] = e.blowup.parameters
    if out.action == "Elliptic":
        witnesses = []
        if dich.variant == "IrrationalSegment":
            witnesses.append("slow_dichotomy")
        if e.blowup is not None and e.blowup.contains_unit_disk:
            witnesses.append("blowup")
        if witnesses:
            out.rationale.append(_step("crosscheck.non-elliptic-witness->inconclusive", witnesses,
                                       f"conflicts with {out.rationale[-1]['rule']}"))
            out.action = "Inconclusive"
    return out


def _perp_verdict(scan: ScanTable, p: int, q: int) -> Optional[Verdict]:
    a, b = canonical_pair(-q, p)
    return scan.verdict_for(a, b)


def consistency_audit(e: EvidenceBundle, v: ClassificationVerdict) -> list:
    """One-directional sanity rules checked against the evidence; returns findings."""
    out = []
    hc = e.homotopy
    elliptic = v.action == "Elliptic"
    decided = v.action in ("Elliptic", "Parabolic", "Hyperbolic")
    if hc is not None and hc.variant == "Identity" and e.deviation_scan is not None and decided:
        some = e.deviation_scan.exists_bounded
        if elliptic and not some:
            out.append({"finding": "conflict: bounded-deviation equivalence",
                        "detail": "elliptic verdict but no rational direction has bounded deviation"})
        if not elliptic and some:
            d = e.deviation_scan.bounded_directions()[0]
            out.append({"finding": "conflict: bounded-deviation equivalence",
                        "detail": f"{v.action} verdict but deviation along ({d.p}, {d.q}) is bounded"})
    if hc is not None and hc.variant == "DehnTwistConjugate" and e.transverse_deviation is not None and decided:
        if elliptic != e.transverse_deviation.bounded:
            out.append({"finding": "conflict: bounded-deviation equivalence",
                        "detail": f"{v.action} verdict with vertical deviation {e.transverse_deviation.kind}"})
    if elliptic and e.fine_curve is not None and not e.fine_curve.bounded_flag:
        out.append({"finding": "conflict: if-direction",
                    "detail": f"elliptic verdict but fine-curve bounds grow (sup {e.fine_curve.sup_bound})"})
    shape = e.rotation if isinstance(e.rotation, RotationSetShape) else None
    if shape is not None and shape.variant == "Segment" and shape.rational_direction is not None \
            and e.deviation_scan is not None:
        rd = shape.rational_direction
        if shape.passes_rational_point:
            pv = _perp_verdict(e.deviation_scan, rd.p, rd.q)
            if pv is not None and pv.kind == "Unbounded":
                out.append({"finding": "conflict: rational segment through a rational point",
                            "detail": f"deviation perpendicular to ({rd.p}, {rd.q}) is unbounded"})
        elif e.deviation_scan.exists_bounded:
            out.append({"finding": "conflict: rational segment avoiding rational points",
                        "detail": "such rotation sets force unbounded deviation, but the scan found a bounded one"})
    return out
