"""Group-sparse M-estimation with interactive forward-backward selection.

The core objects: a :class:`~groupsel.groups.GroupPartition` describing the
known feature grouping, an :class:`~groupsel.criterion.Objective` (least
squares or logistic), and a path engine that alternates discounted-greedy
forward steps with automatic backward elimination.  Cross-validation,
a group-lasso baseline, simulation generators, evaluation metrics, theory
checks, a CLI, and an HTTP session service sit on top.
"""

from .baselines import (
    GroupLassoConfig,
    LassoPathResult,
    alpha_max,
    default_alpha_grid,
    foba_fit,
    group_lasso_fit,
    group_lasso_path,
    kkt_residual,
    prox_group,
)
from .bench import bench_table, run_replication, run_replications
from .criterion import (
    Dataset,
    Objective,
    RestrictedSolveReport,
    forward_gain,
    make_dataset,
    make_objective,
    restricted_minimize,
    standardize,
)
from .engine import (
    GREEDY,
    Candidate,
    FittedModel,
    IgaConfig,
    PathEngine,
    PathEvent,
    SelectionPath,
    SelectionPolicy,
    Snapshot,
    candidate_set,
    forward_step,
    path_to_dict,
    priority_policy,
    run_path,
    state_at_iteration,
    verify_path_invariants,
)
from .errors import (
    CombinatorialBudgetError,
    CoverageError,
    DimensionError,
    EngineInvariantError,
    FamilyError,
    GroupselError,
    NoCandidates,
    OverlapError,
    PolicyError,
    RangeError,
    SingularError,
    ZeroColumnError,
)
from .groups import (
    GroupNorms,
    GroupPartition,
    GroupSet,
    embed,
    feature_set,
    group_norms,
    load_partition,
    partition_from_dict,
    partition_to_dict,
    save_partition,
    singleton_partition,
    validate_partition,
)
from .metrics import EvalReport, ReplicationSummary, evaluate, selected_groups, summarize
from .modelselect import (
    CvPlan,
    CvResult,
    cv_loss,
    cv_select,
    cv_select_group_lasso,
    kfold_split,
    make_cv_plan,
)
from .session import create_app
from .simulate import (
    SimInstance,
    SimSpec,
    gen_case1,
    gen_case2,
    gen_heuristic,
    generate,
    make_priority_list,
)
from .verify import (
    LogisticRegularity,
    RegularityReport,
    SandwichReport,
    ScalingReport,
    gain_sandwich_check,
    gradient_check,
    logistic_regularity,
    phi_bounds,
    rho_bounds,
    scaling_experiment,
)

__version__ = "0.1.0"
