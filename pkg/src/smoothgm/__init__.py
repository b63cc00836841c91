"""Kernel-smoothed joint estimation of label-indexed Gaussian graphical models.

The pipeline: per-subject covariances are smoothed across a subject label
with a compact-support kernel, the smoothed matrix feeds a column-wise
constrained-l1 precision estimator built on an in-house simplex LP, and a
threshold turns the estimate into a conditional-independence graph. A
VAR(1) simulation harness and ROC/error evaluation reproduce the standard
experiment designs at desk scale.
"""

__version__ = "0.1.0"

from .clime import (
    GraphEstimate,
    LpProblem,
    LpSolution,
    PrecisionEstimate,
    estimate_precision,
    lambda_grid,
    solve_column,
    solve_lp,
    threshold_graph,
)
from .covariance import Panel, SmoothedCovariance, smoothed_covariance, subject_covariance
from .errors import (
    AllWeightsZero,
    BadBlocks,
    BadPermutation,
    ConfigError,
    DimensionMismatch,
    EdgeBudgetExceeded,
    Infeasible,
    IterationLimit,
    LpError,
    NoSubjectAtLabel,
    NotPositiveDefinite,
    NotStationary,
    ResidualNotPD,
    SmoothgmError,
    TooFewObservations,
    Unbounded,
    UnknownLabel,
)
from .evaluate import (
    ExperimentReport,
    RateParams,
    RocCurve,
    RocPoint,
    auc,
    estimation_errors,
    kappa,
    kappa_star,
    naive_covariance,
    roc_curve,
    tpr_fpr,
)
from .kernels import (
    KernelSpec,
    WeightVector,
    compute_weights,
    eval_kernel,
    theoretical_bandwidth_dependent,
    theoretical_bandwidth_iid,
)
from .matstat import (
    TransitionMatrix,
    build_transition,
    cholesky,
    invert_spd,
    matrix_norms,
    power_iteration,
    residual_covariance,
    spectral_norm,
    stationary_covariance,
)
from .simulate import (
    PrecisionPath,
    SimConfig,
    equispaced_labels,
    path_random,
    path_sequential,
    path_simultaneous,
    permute_labels,
    sample_panel,
)
