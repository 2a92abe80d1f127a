"""Order-statistic samples and samplers.

The joint density of the i-th and j-th order statistics factorises into
independent Gamma(1, v) spacings, so V_1..V_k are drawn as cumulative sums of
exponential spacings. Interval counts X_1..X_k use the same construction with
scale 1/r.
"""

import math
from functools import cached_property
from typing import Self

import numpy as np
from pydantic import Field, field_validator

from bobtaillab.core import require
from bobtaillab.helpers.pydantic import FrozenModel
from bobtaillab.stats.params import MiningParams


class OrderStatSample(FrozenModel):
    values: tuple[float, ...] = Field(min_length=1)

    @field_validator("values")
    @classmethod
    def check_sorted(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("order statistics must be sorted ascending")
        return v

    @property
    def k(self) -> int:
        return len(self.values)

    @cached_property
    def w_k(self) -> float:
        return math.fsum(self.values) / self.k

    @cached_property
    def normalized(self) -> tuple[float, ...]:
        return tuple(value / i for i, value in enumerate(self.values, start=1))


class IntervalCountSample(FrozenModel):
    x: tuple[float, ...] = Field(min_length=1)

    @property
    def k(self) -> int:
        return len(self.x)

    @cached_property
    def normalized(self) -> tuple[float, ...]:
        return tuple(value / i for i, value in enumerate(self.x, start=1))

    @cached_property
    def y_k(self) -> float:
        return estimator_y(self)

    @classmethod
    def from_counts(cls, counts: np.ndarray | list[float]) -> Self:
        return cls(x=tuple(float(c) for c in counts))


def estimator_y(sample: IntervalCountSample) -> float:
    """Y_k = 2/(k+1) * mean(X_i), the normalized block-time estimator"""
    k = sample.k
    return 2.0 / (k + 1) * (math.fsum(sample.x) / k)


def exponential_spacings(k: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    require(k >= 1, f"k must be positive, got {k}")
    return np.cumsum(rng.exponential(scale, size=k))


def sample_order_stats(params: MiningParams, rng: np.random.Generator) -> OrderStatSample:
    return OrderStatSample(values=tuple(exponential_spacings(params.k, params.v, rng).tolist()))


def sample_interval_counts(params: MiningParams, rng: np.random.Generator) -> IntervalCountSample:
    return IntervalCountSample.from_counts(exponential_spacings(params.k, 1.0 / params.r, rng))


def sample_order_stats_matrix(k: int, scale: float, trials: int, rng: np.random.Generator) -> np.ndarray:
    """``trials`` x ``k`` matrix of ascending order statistics, one row per trial"""
    require(k >= 1, f"k must be positive, got {k}")
    return np.cumsum(rng.exponential(scale, size=(trials, k)), axis=1)


def sample_sorted_uniforms(h: int, k: int, S: float, rng: np.random.Generator) -> np.ndarray:
    """Brute-force reference: the k lowest of h uniform hashes on [0, S]"""
    require(1 <= k <= h, f"need 1 <= k <= h, got k={k}, h={h}")
    draws = rng.uniform(0.0, S, size=h)
    return np.sort(np.partition(draws, k - 1)[:k])


def finite_order_stat_pdf(t: float, i: int, S: float, h: int) -> float:
    """Exact density of the i-th lowest of h uniform hashes on [0, S], evaluated in log space"""
    require(1 <= i <= h, f"rank must satisfy 1 <= i <= h, got i={i}, h={h}")
    require(0.0 <= t <= S, f"t must lie in [0, S], got {t!r}")
    u = t / S
    if u == 0.0:
        return h / S if i == 1 else 0.0
    if u == 1.0:
        return h / S if i == h else 0.0
    log_binomial = math.lgamma(h + 1) - math.lgamma(i) - math.lgamma(h - i + 1)
    log_density = log_binomial + (i - 1) * math.log(u) + (h - i) * math.log1p(-u) - math.log(S)
    return math.exp(log_density)
