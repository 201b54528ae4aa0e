from .assumptions import ExponentialTypeEstimate, check_assumptions, estimate_exponential_type
from .bounds import (
    BoundConstants,
    BoundInputs,
    DriftCheck,
    bound_constants,
    constraint_gap_bound,
    drift_conditions,
    hajek_bound,
)
from .checks import (
    argmin_violations,
    equivalence_violations,
    incremental_sum_error,
    queue_norm_increment_violations,
    trim_violations,
)
from .series import (
    ExpMoment,
    HittingTimeSeries,
    RecordSeries,
    TruncatedSeries,
    empirical_exp_moment,
    f_process,
    f_process_violations,
    flag_counts_by_half,
    hitting_times,
    k_norm,
    k_norm_series,
    truncated_series,
    truncation_caps,
)

__all__ = [
    "ExponentialTypeEstimate",
    "check_assumptions",
    "estimate_exponential_type",
    "BoundConstants",
    "BoundInputs",
    "DriftCheck",
    "bound_constants",
    "constraint_gap_bound",
    "drift_conditions",
    "hajek_bound",
    "argmin_violations",
    "equivalence_violations",
    "incremental_sum_error",
    "queue_norm_increment_violations",
    "trim_violations",
    "ExpMoment",
    "HittingTimeSeries",
    "RecordSeries",
    "TruncatedSeries",
    "empirical_exp_moment",
    "f_process",
    "f_process_violations",
    "flag_counts_by_half",
    "hitting_times",
    "k_norm",
    "k_norm_series",
    "truncated_series",
    "truncation_caps",
]
