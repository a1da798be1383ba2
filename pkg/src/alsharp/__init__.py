"""Adaptive L# for Mealy machines."""

from .adaptive import ABLATIONS, AdaptiveLSharp, run_alsharp
from .dot import parse_dot, read_dot, write_dot
from .learner import LSharp, run_lsharp
from .mealy import (
    MealyMachine,
    language_equivalent,
    minimize_restricted,
    restrict,
    separating_family,
    state_cover,
    total_apart,
    walk,
)
from .mutations import MutationSpec, mutate
from .obstree import ObservationTree, compute_norm
from .oracle import RunMetrics, WpParams
from .reference import ReferencePack, build_reference_pack

__all__ = [
    "ABLATIONS", "AdaptiveLSharp", "LSharp", "MealyMachine", "MutationSpec",
    "ObservationTree", "ReferencePack", "RunMetrics", "WpParams",
    "build_reference_pack", "compute_norm", "language_equivalent",
    "minimize_restricted", "mutate", "parse_dot", "read_dot", "restrict",
    "run_alsharp", "run_lsharp", "separating_family", "state_cover",
    "total_apart", "walk", "write_dot",
]
