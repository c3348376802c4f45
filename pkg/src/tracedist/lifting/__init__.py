from .functors import (
    EvalKind,
    LiftParams,
    hausdorff_lift,
    input_lift,
    kantorovich_candidate_bound,
    kantorovich_dist_lift,
    m2_lift,
    machine_lift,
    wasserstein_dist_lift,
)
from .compositionality import compositionality_check
from .wellbehaved import check_well_behaved

__all__ = [
    "EvalKind", "LiftParams", "hausdorff_lift", "input_lift", "kantorovich_candidate_bound",
    "kantorovich_dist_lift", "m2_lift", "machine_lift", "wasserstein_dist_lift",
    "compositionality_check", "check_well_behaved",
]
