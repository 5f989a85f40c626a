import math
from fractions import Fraction

import numpy as np
import pytest

from rotlab.classifier import RULES, EvidenceBundle, classify, consistency_audit, dehn_is_point
from rotlab.deviation import ScanRow, ScanTable, Verdict
from rotlab.errors import MissingEvidence
from rotlab.finecurve import OrbitBound
from rotlab.geometry import ConvexPolygon, Direction, RationalDirection
from rotlab.lifts import classify_matrix
from rotlab.rotation import RotationSetEstimate, RotationSetShape
from rotlab.slow import DichotomyVerdict, RenormalizedCandidate

IDENTITY = classify_matrix(np.eye(2, dtype=int))
DEHN = classify_matrix(np.array([[1, 1], [0, 1]]))
ANOSOV = classify_matrix(np.array([[2, 1], [1, 1]]))
ROT90 = classify_matrix(np.array([[0, -1], [1, 0]]))

BOUNDED = Verdict("Bounded", {}, sup=0.0, slope=0.0)
UNBOUNDED = Verdict("Unbounded", {}, exponent=1.0, slope=1.0)
INCONCLUSIVE = Verdict("Inconclusive", {}, slope=0.1)
SINGLE = DichotomyVerdict("SingleRationalLine", {}, rational=RationalDirection(1, 0))
IRRATIONAL = DichotomyVerdict("IrrationalSegment", {})


def point(rational=(Fraction(1, 2), Fraction(1, 3))):
    return RotationSetShape("Point", 0.01, 32, 0.01, center=tuple(map(float, rational)), rational=rational)


def segment(rd=(1, 0), through=True):
    return RotationSetShape("Segment", 0.01, 32, 0.01, direction=Direction(0.0),
                            rational_direction=None if rd is None else RationalDirection(*rd),
                            passes_rational_point=through,
                            rational_point=(Fraction(0), Fraction(0)) if through else None)


def interior():
    return RotationSetShape("Interior", 0.01, 32, 0.01, area=1.0)


def scan(bounded=((0, 1),), others=((1, 0), (1, 1)), other_verdict=UNBOUNDED):
    rows = [ScanRow(RationalDirection(*d), BOUNDED) for d in bounded]
    rows += [ScanRow(RationalDirection(*d), other_verdict) for d in others]
    return ScanTable(rows, {"q_max": 1})


def dehn_est(lo, hi):
    return RotationSetEstimate("dehn", 500, 0.0, interval=(lo, hi))


def blow(disk):
    return RenormalizedCandidate(ConvexPolygon([(0, 0)]), [], [], [], [], disk, False, 1.0 if disk else 0.1, {})


def bundle(**kw):
    base = dict(homotopy=IDENTITY, rotation=point(), deviation_scan=scan(), slow_dichotomy=SINGLE)
    base.update(kw)
    return EvidenceBundle(**base)


def rules(v):
    return [r["rule"] for r in v.rationale]


# -- every branch of the decision tree

CASES = [
    (dict(homotopy=ANOSOV), "Hyperbolic", "anosov->hyperbolic"),
    (dict(homotopy=ROT90), "Inconclusive", "other-class->inconclusive"),
    (dict(rotation=interior()), "Hyperbolic", "identity.interior->hyperbolic"),
    (dict(rotation=segment(None)), "Parabolic", "identity.segment.irrational->parabolic"),
    (dict(rotation=segment((1, 0), True)), "Elliptic",
     "identity.segment.rational-through-rational-point->elliptic"),
    (dict(rotation=segment((1, 0), False), deviation_scan=scan(bounded=())), "Parabolic",
     "identity.segment.rational-missing-rational-points->parabolic"),
    (dict(), "Elliptic", "identity.point.bounded-rational-deviation->elliptic"),
    (dict(deviation_scan=scan(bounded=())), "Parabolic", "identity.point.unbounded-rational-deviation->parabolic"),
    (dict(homotopy=DEHN, rotation=dehn_est(0.1, 0.4)), "Hyperbolic", "dehn.interval->hyperbolic"),
    (dict(homotopy=DEHN, rotation=dehn_est(0.3, 0.3), transverse_deviation=BOUNDED), "Elliptic",
     "dehn.point.bounded-vertical->elliptic"),
    (dict(homotopy=DEHN, rotation=dehn_est(0.3, 0.3), transverse_deviation=UNBOUNDED), "Parabolic",
     "dehn.point.unbounded-vertical->parabolic"),
]


@pytest.mark.parametrize("kw,action,rule", CASES, ids=[c[2] for c in CASES])
def test_branch(kw, action, rule):
    v = classify(bundle(**kw))
    assert v.action == action and rules(v)[0] == rule
    for r in v.rationale:
        assert r["case"] == RULES[r["rule"]]
        for f in r["evidence"]:
            assert getattr(bundle(**kw), f) is not None


def test_all_rules_covered():
    hit = {c[2] for c in CASES} | {"crosscheck.non-elliptic-witness->inconclusive"}
    assert hit == set(RULES)


def test_franks_misiurewicz_caveat():
    v = classify(bundle(rotation=segment((1, 0), False), deviation_scan=scan(bounded=())))
    assert v.action == "Parabolic" and any("franks-misiurewicz" in c for c in v.caveats)


@pytest.mark.parametrize("witness", [dict(slow_dichotomy=IRRATIONAL), dict(blowup=blow(True))])
def test_crosscheck_blocks_elliptic(witness):
    v = classify(bundle(**witness))
    assert v.action == "Inconclusive"
    assert rules(v) == ["identity.point.bounded-rational-deviation->elliptic",
                        "crosscheck.non-elliptic-witness->inconclusive"]
    both = classify(bundle(slow_dichotomy=IRRATIONAL, blowup=blow(True)))
    assert both.rationale[-1]["evidence"] == ["slow_dichotomy", "blowup"]


def test_crosscheck_ignores_non_elliptic():
    v = classify(bundle(rotation=interior(), slow_dichotomy=IRRATIONAL, blowup=blow(True)))
    assert v.action == "Hyperbolic"
    assert classify(bundle(blowup=blow(False))).action == "Elliptic"


def test_inconclusive_caveats():
    v = classify(bundle(deviation_scan=scan(bounded=(), other_verdict=INCONCLUSIVE)))
    assert v.action == "Parabolic" and v.caveats
    v = classify(bundle(homotopy=DEHN, rotation=dehn_est(0.3, 0.3), transverse_deviation=INCONCLUSIVE))
    assert v.action == "Parabolic" and v.caveats


@pytest.mark.parametrize("drop", ["homotopy", "rotation", "deviation_scan", "slow_dichotomy"])
def test_missing_evidence(drop):
    with pytest.raises(MissingEvidence) as ei:
        classify(bundle(**{drop: None}))
    assert drop in str(ei.value)


def test_missing_dehn_evidence():
    with pytest.raises(MissingEvidence):
        classify(bundle(homotopy=DEHN, rotation=dehn_est(0.3, 0.3)))
    with pytest.raises(MissingEvidence):
        classify(bundle(homotopy=DEHN, rotation=point(), transverse_deviation=BOUNDED))
    # a nontrivial interval needs no deviation evidence
    assert classify(bundle(homotopy=DEHN, rotation=dehn_est(0.0, 0.5))).action == "Hyperbolic"


def test_dehn_tolerance():
    assert dehn_is_point(dehn_est(0.3, 0.301), 0.01) == (True, 0.01)
    assert dehn_is_point(dehn_est(0.3, 0.4), 0.01)[0] is False
    est = dehn_est(0.3, 0.3)
    assert dehn_is_point(est)[1] == pytest.approx(5 * math.sqrt(2) / 500)


def test_determinism():
    a, b = classify(bundle()), classify(bundle())
    assert a.to_dict() == b.to_dict()


# -- audit

def test_audit_findings():
    grow = OrbitBound(40, False)
    f = consistency_audit(bundle(fine_curve=grow), classify(bundle()))
    assert [x["finding"] for x in f] == ["conflict: if-direction"]
    e = bundle(deviation_scan=scan(bounded=((0, 1), (1, 0), (1, 1)), others=()))
    v = classify(bundle(deviation_scan=scan(bounded=())))  # a parabolic verdict against an all-bounded scan
    assert [x["finding"] for x in consistency_audit(e, v)] == ["conflict: bounded-deviation equivalence"]
    e = bundle(homotopy=DEHN, rotation=dehn_est(0.3, 0.3), transverse_deviation=UNBOUNDED)
    v = classify(bundle(homotopy=DEHN, rotation=dehn_est(0.3, 0.3), transverse_deviation=BOUNDED))
    assert consistency_audit(e, v)[0]["finding"] == "conflict: bounded-deviation equivalence"


def test_audit_segment_rules():
    # rational segment through a rational point with unbounded perpendicular deviation
    e = bundle(rotation=segment((1, 0), True), deviation_scan=scan(bounded=((1, 1),), others=((0, 1),)))
    f = [x["finding"] for x in consistency_audit(e, classify(e))]
    assert "conflict: rational segment through a rational point" in f
    e = bundle(rotation=segment((1, 0), False), deviation_scan=scan(bounded=((0, 1),)))
    f = [x["finding"] for x in consistency_audit(e, classify(e))]
    assert "conflict: rational segment avoiding rational points" in f


def test_audit_clean_synthetic():
    for kw, action, _ in CASES:
        kw = dict(kw)
        if action != "Elliptic" and "deviation_scan" not in kw:
            kw["deviation_scan"] = scan(bounded=())  # consistent evidence for a non-elliptic verdict
        e = bundle(**kw)
        assert consistency_audit(e, classify(e)) == [], kw


# -- real fixtures

@pytest.mark.parametrize("name,action,rule", [
    ("translation", "Elliptic", "identity.point.bounded-rational-deviation->elliptic"),
    ("shear", "Elliptic", "identity.segment.rational-through-rational-point->elliptic"),
    ("anosov", "Hyperbolic", "anosov->hyperbolic"),
    ("interior", "Hyperbolic", "identity.interior->hyperbolic"),
    ("twist", "Elliptic", "dehn.point.bounded-vertical->elliptic"),
    ("dehn-hyperbolic", "Hyperbolic", "dehn.interval->hyperbolic"),
])
def test_builtin_fixture_verdicts(get_pipeline, name, action, rule):
    p = get_pipeline(name)
    r = p.report.data
    assert r["verdict"]["action"] == action and r["verdict"]["rationale"][0]["rule"] == rule
    assert r["audit"] == [] and r["errors"] == []
