"""Behavioral and trace pseudometrics for nondeterministic and probabilistic automata."""

from .automata import NfaCoalgebra, PaCoalgebra, disjoint_union
from .findist import FinDist
from .io import parse_automaton, serialize_automaton
from .lifting import (
    EvalKind,
    LiftParams,
    check_well_behaved,
    compositionality_check,
    hausdorff_lift,
    input_lift,
    kantorovich_dist_lift,
    m2_lift,
    machine_lift,
    wasserstein_dist_lift,
)
from .metric import PseudometricSpace, discrete_metric, euclidean_interval_metric, validate_pseudometric
from .monads import (
    check_em_law_nonexpansive,
    check_monad_metric_laws,
    determinize_step_nfa,
    determinize_step_pa,
    dist_mult,
    dist_unit,
    pow_mult,
    pow_unit,
)
from .oracle import (
    WordSemantics,
    closed_form_nfa_distance,
    closed_form_pa_distance,
    enumerate_couplings,
    nfa_language,
    pa_word_weights,
)
from .trace import (
    ALL_SINGLETONS,
    DistTable,
    compare_branching_trace,
    nfa_branching_distance,
    nfa_trace_distance,
    pa_branching_distance,
    pa_trace_distance,
)
from .transport import TransportProblem, solve_dense_lp, solve_transportation

__version__ = "0.1.0"
