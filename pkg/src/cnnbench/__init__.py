"""Exact workbench for the continuously-moving-request alignment problem."""

from .scalar import Scalar, SQRT3, ZERO, ONE
from .geometry import Point, Vector, Frame, l1_distance
from .model import (
    AlignedTrajectory,
    Instance,
    ModelError,
    RequestSegment,
    rectify,
    refine,
    validate_alignment,
)
from .engine import OnlineServer, Trace, TraceEvent, run, trace_trajectory
from .potential import (
    RATIO,
    VerificationReport,
    append_homing_suffix,
    competitive_ratio,
    f_term,
    potential_record,
    verify_nondecreasing,
)
from .generators import (
    GeneratedPair,
    adversary_continuous,
    fig2_scenario,
    random_orthogonal,
    tight1,
    tight2,
)
from .unitcnn import (
    adversary_unit_square,
    bruteforce_opt,
    exhaustive_frugal_opt,
    ortho3_run,
    sweet4_run,
)

__all__ = [
    "Scalar", "SQRT3", "ZERO", "ONE",
    "Point", "Vector", "Frame", "l1_distance",
    "AlignedTrajectory", "Instance", "ModelError", "RequestSegment",
    "rectify", "refine", "validate_alignment",
    "OnlineServer", "Trace", "TraceEvent", "run", "trace_trajectory",
    "RATIO", "VerificationReport", "append_homing_suffix",
    "competitive_ratio", "f_term", "potential_record", "verify_nondecreasing",
    "GeneratedPair", "adversary_continuous", "fig2_scenario",
    "random_orthogonal", "tight1", "tight2",
    "adversary_unit_square", "bruteforce_opt", "exhaustive_frugal_opt",
    "ortho3_run", "sweet4_run",
]

__version__ = "1.0.0"
