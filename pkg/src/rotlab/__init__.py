"""Numerical experiments on rotation sets and fine-curve-graph actions of torus homeomorphisms."""
from .classifier import ClassificationVerdict, EvidenceBundle, classify, consistency_audit
from .config import ExperimentConfig
from .deviation import boundedness_verdict, deviation_profile, rational_deviation_scan
from .errors import (ClassMismatch, CornerHit, DegenerateImage, HorizonTooLarge, InvalidInput, InvalidSlope,
                     MissingEvidence, NonInvariantLoop, NotALift, RotlabError)
from .finecurve import LoopClass, graph_orbit_bound, intersection_count
from .geometry import ConvexPolygon, Direction, RationalDirection, best_rational_direction, convex_hull, \
    diameter, hausdorff_distance
from .lifts import LiftMap, compose, detect_homotopy_class, estimate_K_f, make_linear, make_shear_x, \
    make_shear_y, make_translation, make_twist
from .orbit import iterate_domain
from .pipeline import Report, run_pipeline
from .plots import emit_plot_data
from .rotation import rotation_set_estimate, shape_classify
from .slow import blowup_search, dichotomy_report, good_limit_candidates, main_direction
from .squaretiled import SquareTiledSurface, min_crossing_length, trace_line

__version__ = "0.1.0"
