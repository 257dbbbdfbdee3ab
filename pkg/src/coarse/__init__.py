"""Coarse geometry at desk scale: verdicts, ends and Čech cohomology of coarse covers."""

from .cli import Report, run
from .coarse_logic import (
    MapTable,
    ScaleSchedule,
    Status,
    Verdict,
    closeness_verdict,
    coarse_map_verdict,
    coarsely_surjective_verdict,
    coentourage_verdict,
    cover_verdict,
    divergence_set,
    flasque_verdict,
    identity_map,
    is_bounded_subset,
    is_refinement,
    shift_cover,
)
from .cohomology import (
    CechComplex,
    CohomologyResult,
    cech_complex,
    cohomology,
    constant_sections,
    cover_cohomology,
    mayer_vietoris_report,
    refinement_comparison,
)
from .config import JobConfig, parse_config
from .ends import EndsParams, EndsReport, InfiniteAtCap, end_restriction, ends
from .snf import AbelianGroupFG, IntegerMatrix, smith_normal_form
from .spaces import build_space, in_entourage, window_points
from .subspaces import subspace_eval

__all__ = [
    "AbelianGroupFG", "CechComplex", "CohomologyResult", "EndsParams", "EndsReport", "InfiniteAtCap",
    "IntegerMatrix", "JobConfig", "MapTable", "Report", "ScaleSchedule", "Status", "Verdict",
    "build_space", "cech_complex", "closeness_verdict", "coarse_map_verdict", "coarsely_surjective_verdict",
    "coentourage_verdict", "cohomology", "constant_sections", "cover_cohomology", "cover_verdict",
    "divergence_set", "end_restriction", "ends", "flasque_verdict", "identity_map", "in_entourage",
    "is_bounded_subset", "is_refinement", "mayer_vietoris_report", "parse_config", "refinement_comparison",
    "run", "shift_cover", "smith_normal_form", "subspace_eval", "window_points",
]
