"""Closed forms for the Bobtail mining statistic and its derived quantities."""

import math
from typing import NamedTuple

from bobtaillab.core import require
from bobtaillab.stats.gamma import gamma_quantile
from bobtaillab.stats.params import MiningParams


def _check_k_v(k: int, v: float) -> None:
    require(isinstance(k, int) and k >= 1, f"k must be a positive integer, got {k!r}")
    require(v > 0.0, f"v must be positive, got {v!r}")


def expected_v(i: int, v: float) -> float:
    """E[V_i] = i v"""
    _check_k_v(i, v)
    return i * v


def expected_x(i: int, r: float) -> float:
    """E[X_i] = i / r"""
    require(r > 0.0, f"rate must be positive, got {r!r}")
    return i / r


def expected_w(k: int, v: float) -> float:
    """E[W_k] = (k+1)/2 v"""
    _check_k_v(k, v)
    return (k + 1) / 2 * v


def variance_w(k: int, v: float) -> float:
    """Var[W_k] = (k+1)(2k+1)/(6k) v^2"""
    _check_k_v(k, v)
    return (k + 1) * (2 * k + 1) / (6 * k) * v * v


def joint_moment_vivj(i: int, j: int, v: float) -> float:
    """E[V_i V_j] = i v^2 (1 + j) for j > i"""
    require(isinstance(i, int) and i >= 1, f"i must be a positive integer, got {i!r}")
    require(isinstance(j, int) and j > i, f"j must exceed i, got i={i!r}, j={j!r}")
    require(v > 0.0, f"v must be positive, got {v!r}")
    return i * v * v * (1 + j)


def covariance_vivj(i: int, j: int, v: float) -> float:
    """cov[V_i, V_j] = Var[V_i] = i v^2 for j >= i"""
    require(isinstance(i, int) and i >= 1, f"i must be a positive integer, got {i!r}")
    require(isinstance(j, int) and j >= i, f"j must be at least i, got i={i!r}, j={j!r}")
    require(v > 0.0, f"v must be positive, got {v!r}")
    return i * v * v


def target_for_k(k: int, v: float) -> float:
    """Mining target t_k = (k+1)/2 v that keeps the expected block time of k = 1"""
    return expected_w(k, v)


def variance_mean_x(k: int, r: float) -> float:
    """Var[(1/k) sum X_i] = (k+1)(2k+1)/(6k) (1/r)^2"""
    require(r > 0.0, f"rate must be positive, got {r!r}")
    return variance_w(k, 1.0 / r)


def variance_ratio(k: int) -> float:
    """Var[Y_k] / Var[Y_1] = (8k+4) / (6(k^2+k))"""
    require(isinstance(k, int) and k >= 1, f"k must be a positive integer, got {k!r}")
    return (8 * k + 4) / (6 * (k * k + k))


def chernoff_message_bound(y: float, epsilon: float) -> float:
    """Upper bound on P(M >= (1+epsilon) y) for the number of announced proofs M"""
    require(y >= 0.0, f"y must be non-negative, got {y!r}")
    require(epsilon >= 0.0, f"epsilon must be non-negative, got {epsilon!r}")
    return math.exp(-y * epsilon * epsilon / (2.0 + epsilon))


def orphan_rate_bound(tau: float, T: float) -> float:
    """Probability that another block appears within propagation time tau, 1 - e^(-tau/T)"""
    require(tau >= 0.0, f"tau must be non-negative, got {tau!r}")
    require(T > 0.0, f"T must be positive, got {T!r}")
    return -math.expm1(-tau / T)


def announcement_quantile(p: float, k: int) -> float:
    """Expected number of proofs announced per block, Quantile-Gamma(p; k, 1)"""
    require(0.0 < p < 1.0, f"probability must be in (0, 1), got {p!r}")
    return gamma_quantile(p, k, 1.0)


class BroadcastThreshold(NamedTuple):
    x_threshold: float
    expected_announcements: float


def broadcast_threshold(p: float, params: MiningParams) -> BroadcastThreshold:
    """Largest proof value worth announcing and the expected announcements per block.

    ``x`` is the p-quantile of V_k ~ Gamma(k, v). A block spans h / r hashes,
    so the expected number of hashes below ``x`` in one block is h x / (r S),
    which equals Quantile-Gamma(p; k, 1) for every h, r and S.
    """
    require(0.0 < p < 1.0, f"probability must be in (0, 1), got {p!r}")
    x = gamma_quantile(p, params.k, params.v)
    return BroadcastThreshold(x_threshold=x, expected_announcements=params.h * x / (params.r * params.S))
