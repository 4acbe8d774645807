"""sparsekit: sparse-signal recovery via l1 minimization, with exact
restricted-isometry analysis and machine-checked error-bound certificates."""

from .model import (
    DegenerateMatrixError,
    NoiseSpec,
    Observation,
    SensingMatrix,
    SparseSignal,
    best_k_term,
    column_normalize,
    generate_matrix,
    generate_signal,
    observe,
    read_matrix_text,
    read_vector_text,
    write_matrix_text,
    write_vector_text,
)
from .chains import DescendingChain, half_tail_bound, is_tight, sort_descending, third_tail_bound
from .constants import (
    CONDITION_VARIANTS,
    ConditionReport,
    ConstantEstimate,
    EnumerationBudgetError,
    IncompleteReportError,
    RipReport,
    build_rip_report,
    check_condition,
    coherence,
    delta_exact,
    delta_theta_mc_lower,
    mip_to_rip,
    theta_exact,
    theta_split_bound,
)
from .lp import LpProblem, LpSolution, SolverOptions, solve_lp
from .solvers import (
    RecoveryResult,
    basis_pursuit,
    dantzig_selector,
    gaussian_thresholds,
    l2_constrained_l1,
    lasso,
)
from .bounds import (
    BoundCertificate,
    CertificateError,
    ConstantSet,
    UnknownTheoremError,
    certify,
    comparison_constants,
    support_enlargement_ratio,
    theorem_constants,
)
from .harness import (
    ExperimentConfig,
    ExperimentRun,
    ResultsTable,
    TailReport,
    load_config,
    report,
    run_experiment,
    validate_tails,
)
from .estimators import BasisPursuit, DantzigSelector, L2ConstrainedL1, Lasso

__version__ = "0.1.0"

__all__ = [
    "BasisPursuit",
    "BoundCertificate",
    "CertificateError",
    "CONDITION_VARIANTS",
    "ConditionReport",
    "ConstantEstimate",
    "ConstantSet",
    "DantzigSelector",
    "DegenerateMatrixError",
    "DescendingChain",
    "EnumerationBudgetError",
    "ExperimentConfig",
    "ExperimentRun",
    "IncompleteReportError",
    "L2ConstrainedL1",
    "Lasso",
    "LpProblem",
    "LpSolution",
    "NoiseSpec",
    "Observation",
    "RecoveryResult",
    "ResultsTable",
    "RipReport",
    "SensingMatrix",
    "SolverOptions",
    "SparseSignal",
    "TailReport",
    "basis_pursuit",
    "best_k_term",
    "build_rip_report",
    "certify",
    "check_condition",
    "coherence",
    "column_normalize",
    "comparison_constants",
    "dantzig_selector",
    "delta_exact",
    "delta_theta_mc_lower",
    "gaussian_thresholds",
    "generate_matrix",
    "generate_signal",
    "half_tail_bound",
    "is_tight",
    "l2_constrained_l1",
    "lasso",
    "load_config",
    "mip_to_rip",
    "observe",
    "read_matrix_text",
    "read_vector_text",
    "report",
    "run_experiment",
    "solve_lp",
    "sort_descending",
    "support_enlargement_ratio",
    "theorem_constants",
    "theta_exact",
    "theta_split_bound",
    "third_tail_bound",
    "validate_tails",
    "write_matrix_text",
    "write_vector_text",
]
