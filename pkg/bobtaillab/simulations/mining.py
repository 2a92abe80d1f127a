"""Network-free Monte Carlo experiments on the mining process.

Time is measured in hash intervals, the expected time for ``r`` hashes below
``v``. With ``v`` normalised to 1 the values that can ever enter a valid
package lie below ``k t_k``; such proofs arrive as a Poisson process of rate
``r k t_k`` per interval with values uniform on ``[0, k t_k]``.

The reward experiments use a fixed interval: the k lowest values of one
interval, each owned by miner ``m`` with probability ``x_m`` and generated
at a uniform time in the interval. A proof other than the 1OS earns the bonus
when it was generated after the 1OS.
"""

import bisect
import logging
import math
from collections.abc import Sequence
from functools import partial

import numpy as np
from pydantic import Field
from scipy import stats

from bobtaillab.core import require
from bobtaillab.helpers.pydantic import FrozenModel
from bobtaillab.helpers.rng import derive_seed
from bobtaillab.protocol.types import RewardParams
from bobtaillab.schemas.experiments import BlocktimeModel
from bobtaillab.schemas.results import BlocktimeRow, CdfRow, MomentsRow, RankTimeRow, RewardRow
from bobtaillab.simulations._runner import run_batched, warn_if_few_trials
from bobtaillab.stats.moments import covariance_vivj, expected_w, variance_ratio, variance_w
from bobtaillab.stats.order_stats import sample_order_stats_matrix
from bobtaillab.stats.params import MiningParams
from bobtaillab.stats.summary import empirical_cdf, ks_statistic, summarize, variance_std_error

logger = logging.getLogger(__name__)

CDF_POINTS = 64


class MinerSpec(FrozenModel):
    id: str
    x: float = Field(gt=0.0, le=1.0)
    strategy: str = "honest"


class TrialOutcome(FrozenModel):
    trial: int
    y_k: float
    proofs: tuple[int, ...]
    bonuses: tuple[int, ...]
    rewards: tuple[float, ...]


class BlocktimeResult(FrozenModel):
    rows: list[BlocktimeRow]
    cdf: list[CdfRow]


def check_miners(miners: Sequence[MinerSpec]) -> None:
    require(len(miners) > 0, "at least one miner is required")
    total = math.fsum(m.x for m in miners)
    require(abs(total - 1.0) <= 1e-9, f"hash fractions must sum to 1, got {total}")
    require(len({m.id for m in miners}) == len(miners), "miner ids must be unique")


def blocktime_weights(k: int) -> np.ndarray:
    """Y_k = 2/(k+1) * mean(X_1..X_k) written as a weighted sum of unit spacings"""
    return 2.0 / (k + 1) * (k - np.arange(k)) / k


def draw_blocktimes(k: int, count: int, rng: np.random.Generator, *, scale: float = 1.0) -> np.ndarray:
    """``count`` block times Y_k in intervals, multiplied by ``scale`` (1/power for a partial miner)"""
    return scale * (rng.exponential(1.0, size=(count, k)) @ blocktime_weights(k))


def first_passage_block_time(params: MiningParams, rng: np.random.Generator, *, power: float = 1.0) -> float:
    """Time until the k lowest accumulated proofs first average at most t_k.

    Proofs are generated by a miner holding fraction ``power`` of the hash
    rate; only those below ``k t_k`` are drawn.
    """
    require(0.0 < power <= 1.0, f"power must be in (0, 1], got {power!r}")
    cap = params.k * params.t_k / params.v
    rate = cap * power * params.r
    lowest: list[float] = []
    clock = 0.0
    while True:
        clock += rng.exponential(1.0 / rate)
        value = rng.uniform(0.0, cap)
        if len(lowest) == params.k:
            if value >= lowest[-1]:
                continue
            lowest.pop()
        bisect.insort(lowest, value)
        if len(lowest) == params.k and math.fsum(lowest) <= cap:
            return clock


def _interval_batch(k: int, r: float, rng: np.random.Generator, count: int) -> np.ndarray:
    return draw_blocktimes(k, count, rng, scale=1.0 / r)


def _exact_batch(params: MiningParams, rng: np.random.Generator, count: int) -> np.ndarray:
    return np.array([first_passage_block_time(params, rng) for _ in range(count)])


def run_blocktime_experiment(
    params: MiningParams,
    ks: Sequence[int],
    trials: int,
    seed: int,
    *,
    model: BlocktimeModel = BlocktimeModel.INTERVAL,
    jobs: int = 1,
) -> BlocktimeResult:
    """Block-time samples Y_k for each k, targets set by t_k = (k+1)/2 v, plus an empirical CDF grid"""
    require(len(ks) > 0, "at least one k is required")
    warn_if_few_trials(trials, "blocktime")
    samples: dict[int, np.ndarray] = {}
    for k in ks:
        p = params.with_k(k)
        fn = partial(_exact_batch, p) if model is BlocktimeModel.EXACT else partial(_interval_batch, k, p.r)
        samples[k] = run_batched(fn, trials, derive_seed(seed, k), jobs=jobs)
        logger.info(f"k={k}: mean block time {samples[k].mean():.5f} intervals over {trials} trials")

    base_k = min(ks)
    base_var = float(samples[base_k].var(ddof=1)) if trials > 1 else 0.0
    upper = max(float(np.quantile(s, 0.999)) for s in samples.values())
    grid = np.linspace(0.0, upper, CDF_POINTS)

    rows, cdf_rows = [], []
    for k, ys in samples.items():
        summary = summarize(ys)
        ks_exp = None
        if k == 1 and model is BlocktimeModel.INTERVAL:
            ks_exp = ks_statistic(ys, stats.expon(scale=1.0 / params.r).cdf)
        rows.append(
            BlocktimeRow(
                k=k,
                model=model.value,
                trials=trials,
                seed=seed,
                mean=summary.mean,
                variance=summary.variance,
                ci_low=summary.ci_low,
                ci_high=summary.ci_high,
                predicted_mean=1.0 / params.r,
                variance_ratio=summary.variance / base_var if base_var > 0 else None,
                predicted_variance_ratio=variance_ratio(k) / variance_ratio(base_k),
                ks_exponential=ks_exp,
            )
        )
        cdf_rows.extend(CdfRow(k=k, y=float(y), cdf=float(c)) for y, c in zip(grid, empirical_cdf(ys, grid)))
    return BlocktimeResult(rows=rows, cdf=cdf_rows)


def _order_stat_batch(k: int, v: float, rng: np.random.Generator, count: int) -> np.ndarray:
    return sample_order_stats_matrix(k, v, count, rng)


def run_moments_experiment(
    params: MiningParams,
    ks: Sequence[int],
    trials: int,
    seed: int,
    *,
    jobs: int = 1,
) -> list[MomentsRow]:
    """Empirical mean and variance of W_k and cov(V_1, V_2) against their closed forms"""
    require(len(ks) > 0, "at least one k is required")
    warn_if_few_trials(trials, "moments")
    v = params.v
    rows = []
    for k in ks:
        matrix = run_batched(partial(_order_stat_batch, k, v), trials, derive_seed(seed, k), jobs=jobs)
        w = matrix.mean(axis=1)
        summary = summarize(w)
        cov = None
        if k >= 2 and trials >= 2:
            cov = float(np.cov(matrix[:, 0], matrix[:, 1])[0, 1])
        rows.append(
            MomentsRow(
                k=k,
                trials=trials,
                seed=seed,
                mean_w=summary.mean,
                predicted_mean_w=expected_w(k, v),
                se_mean_w=summary.std_error,
                var_w=summary.variance,
                predicted_var_w=variance_w(k, v),
                se_var_w=variance_std_error(w) if trials >= 4 else None,
                cov_v1_v2=cov,
                predicted_cov_v1_v2=covariance_vivj(1, 2, v) if k >= 2 else None,
            )
        )
        logger.info(f"k={k}: E[W]={summary.mean:.5f} (predicted {expected_w(k, v):.5f})")
    return rows


def _reward_counts(k: int, fractions: np.ndarray, rng: np.random.Generator, count: int) -> np.ndarray:
    """Per trial and miner: proofs among the k lowest, then bonus-earning proofs"""
    n = len(fractions)
    owners = rng.choice(n, size=(count, k), p=fractions)
    times = rng.random((count, k))
    bonus = times > times[:, :1]
    bonus[:, 0] = True
    out = np.empty((count, 2 * n), dtype=np.int64)
    for m in range(n):
        own = owners == m
        out[:, m] = own.sum(axis=1)
        out[:, n + m] = (own & bonus).sum(axis=1)
    return out


def reward_trial(
    miners: Sequence[MinerSpec],
    params: MiningParams,
    reward: RewardParams,
    rng: np.random.Generator,
    trial: int = 0,
) -> TrialOutcome:
    """One interval's block time, proof ownership and reward split"""
    check_miners(miners)
    fractions = np.array([m.x for m in miners])
    n = len(miners)
    y_k = float(draw_blocktimes(params.k, 1, rng, scale=1.0 / params.r)[0])
    counts = _reward_counts(params.k, fractions, rng, 1)[0]
    proofs, bonuses = counts[:n], counts[n:]
    R, B = float(reward.R), float(reward.B)
    return TrialOutcome(
        trial=trial,
        y_k=y_k,
        proofs=tuple(int(c) for c in proofs),
        bonuses=tuple(int(c) for c in bonuses),
        rewards=tuple(R * float(p) + B * float(b) for p, b in zip(proofs, bonuses)),
    )


def run_reward_experiment(
    miners: Sequence[MinerSpec],
    params: MiningParams,
    reward: RewardParams,
    trials: int,
    seed: int,
    *,
    jobs: int = 1,
) -> list[RewardRow]:
    """Per-miner mean R and B earnings per block against x k (R + B/2)"""
    check_miners(miners)
    warn_if_few_trials(trials, "rewards")
    fractions = np.array([m.x for m in miners])
    fractions = fractions / fractions.sum()
    n = len(miners)
    k = params.k
    R, B = float(reward.R), float(reward.B)
    counts = run_batched(partial(_reward_counts, k, fractions), trials, seed, jobs=jobs)
    rows = []
    for m, miner in enumerate(miners):
        proofs, bonuses = counts[:, m], counts[:, n + m]
        total = summarize(R * proofs + B * bonuses)
        rows.append(
            RewardRow(
                miner=miner.id,
                x=miner.x,
                k=k,
                trials=trials,
                seed=seed,
                owned_fraction=float(proofs.mean()) / k,
                r_earnings=R * float(proofs.mean()),
                b_earnings=B * float(bonuses.mean()),
                total=total.mean,
                ci_low=total.ci_low,
                ci_high=total.ci_high,
                predicted_total=reward.expected_honest_total(miner.x, k),
            )
        )
    return rows


def _generation_ranks(k: int, cap: float, sort_by_value: bool, rng: np.random.Generator, count: int) -> np.ndarray:
    """Per trial: generation rank (1 = earliest) of the proofs ranked 1..k by value"""
    out = np.empty((count, k), dtype=np.int64)
    for row in range(count):
        n = max(k, int(rng.poisson(cap)))
        values = rng.random(n)
        times = rng.random(n)
        lowest = np.argpartition(values, k - 1)[:k]
        lowest = lowest[np.argsort(values[lowest])]
        generated = times[lowest]
        if sort_by_value:
            generated = np.sort(generated)
        out[row] = np.argsort(np.argsort(generated)) + 1
    return out


def rank_time_correlation(
    params: MiningParams,
    trials: int,
    seed: int,
    *,
    sort_by_value: bool = False,
    jobs: int = 1,
) -> RankTimeRow:
    """Pearson correlation between a package proof's value rank and its generation order.

    ``sort_by_value`` relabels generation times in value order, a negative
    control whose correlation is 1.
    """
    k = params.k
    require(k >= 2, f"rank correlation needs k >= 2, got {k}")
    warn_if_few_trials(trials, "rank-time")
    cap = k * params.t_k / params.v
    generation = run_batched(partial(_generation_ranks, k, cap, sort_by_value), trials, seed, jobs=jobs)
    ranks = np.broadcast_to(np.arange(1, k + 1), generation.shape)
    correlation = float(np.corrcoef(ranks.ravel(), generation.ravel())[0, 1])
    after_first = float((generation[:, 1:] > generation[:, :1]).mean())
    logger.info(f"k={k}: rank/time correlation {correlation:.5f}, after-1OS fraction {after_first:.4f}")
    return RankTimeRow(
        k=k,
        trials=trials,
        seed=seed,
        sorted_by_value=sort_by_value,
        correlation=correlation,
        fraction_after_first=after_first,
        bound=3.0 / math.sqrt(trials),
    )
