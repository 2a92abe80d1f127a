import math
from collections.abc import Callable, Sequence

import numpy as np
from scipy import stats

from bobtaillab.core import require
from bobtaillab.helpers.pydantic import FrozenModel

CONFIDENCE = 0.95
Z_95 = float(stats.norm.ppf(0.5 + CONFIDENCE / 2))


class Summary(FrozenModel):
    mean: float
    variance: float
    std_error: float
    ci_low: float
    ci_high: float
    trials: int


def summarize(values: Sequence[float] | np.ndarray) -> Summary:
    """Sample mean and variance with a normal-approximation 95% confidence interval"""
    data = np.asarray(values, dtype=float)
    n = int(data.size)
    require(n >= 1, "cannot summarize an empty sample")
    mean = float(data.mean())
    variance = float(data.var(ddof=1)) if n > 1 else 0.0
    std_error = math.sqrt(variance / n)
    return Summary(
        mean=mean,
        variance=variance,
        std_error=std_error,
        ci_low=mean - Z_95 * std_error,
        ci_high=mean + Z_95 * std_error,
        trials=n,
    )


def proportion_summary(successes: int, trials: int) -> Summary:
    """Success fraction with a Wilson score 95% interval"""
    require(trials >= 1, "cannot summarize zero trials")
    require(0 <= successes <= trials, f"successes out of range: {successes}/{trials}")
    p = successes / trials
    interval = stats.binomtest(successes, trials).proportion_ci(confidence_level=CONFIDENCE, method="wilson")
    variance = p * (1 - p)
    return Summary(
        mean=p,
        variance=variance,
        std_error=math.sqrt(variance / trials),
        ci_low=max(0.0, float(interval.low)),
        ci_high=min(1.0, float(interval.high)),
        trials=trials,
    )


def variance_std_error(values: Sequence[float] | np.ndarray) -> float:
    """Standard error of the sample variance, from the fourth central moment"""
    data = np.asarray(values, dtype=float)
    n = data.size
    require(n >= 4, "need at least four observations")
    m2 = float(stats.moment(data, order=2))
    m4 = float(stats.moment(data, order=4))
    return math.sqrt(max(m4 - (n - 3) / (n - 1) * m2 * m2, 0.0) / n)


def ks_statistic(sample: Sequence[float] | np.ndarray, cdf: Callable[[float], float]) -> float:
    """One-sample Kolmogorov-Smirnov distance between ``sample`` and ``cdf``; scalar cdfs are vectorised"""
    data = np.asarray(sample, dtype=float)
    require(data.size >= 1, "empty sample")
    return float(stats.ks_1samp(data, np.vectorize(cdf, otypes=[float])).statistic)


def ks_two_sample(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov distance"""
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    require(xa.size >= 1 and xb.size >= 1, "empty sample")
    return float(stats.ks_2samp(xa, xb).statistic)


def empirical_cdf(values: Sequence[float] | np.ndarray, grid: Sequence[float] | np.ndarray) -> np.ndarray:
    return stats.ecdf(np.asarray(values, dtype=float)).cdf.evaluate(np.asarray(grid, dtype=float))
