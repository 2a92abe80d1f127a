from .gamma import (
    gamma_cdf,
    gamma_pdf,
    gamma_quantile,
    gamma_sf,
    regularized_lower_gamma,
    regularized_upper_gamma,
)
from .moments import (
    BroadcastThreshold,
    announcement_quantile,
    broadcast_threshold,
    chernoff_message_bound,
    covariance_vivj,
    expected_v,
    expected_w,
    expected_x,
    joint_moment_vivj,
    orphan_rate_bound,
    target_for_k,
    variance_mean_x,
    variance_ratio,
    variance_w,
)
from .order_stats import (
    IntervalCountSample,
    OrderStatSample,
    estimator_y,
    finite_order_stat_pdf,
    sample_interval_counts,
    sample_order_stats,
    sample_order_stats_matrix,
    sample_sorted_uniforms,
)
from .params import MiningParams
from .summary import Summary, ks_statistic, ks_two_sample, proportion_summary, summarize

__all__ = [
    "BroadcastThreshold",
    "IntervalCountSample",
    "MiningParams",
    "OrderStatSample",
    "Summary",
    "announcement_quantile",
    "broadcast_threshold",
    "chernoff_message_bound",
    "covariance_vivj",
    "estimator_y",
    "expected_v",
    "expected_w",
    "expected_x",
    "finite_order_stat_pdf",
    "gamma_cdf",
    "gamma_pdf",
    "gamma_quantile",
    "gamma_sf",
    "joint_moment_vivj",
    "ks_statistic",
    "ks_two_sample",
    "orphan_rate_bound",
    "proportion_summary",
    "regularized_lower_gamma",
    "regularized_upper_gamma",
    "sample_interval_counts",
    "sample_order_stats",
    "sample_order_stats_matrix",
    "sample_sorted_uniforms",
    "summarize",
    "target_for_k",
    "variance_mean_x",
    "variance_ratio",
    "variance_w",
]
