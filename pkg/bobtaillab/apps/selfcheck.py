"""Self-check suite: the closed forms of ``bobtaillab.stats`` against Monte Carlo oracles."""

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np

from bobtaillab.helpers.rng import derive_seed, make_rng
from bobtaillab.protocol.types import RewardParams
from bobtaillab.schemas.results import CheckRow
from bobtaillab.simulations.mining import MinerSpec, draw_blocktimes, rank_time_correlation, run_reward_experiment
from bobtaillab.stats.gamma import gamma_cdf, gamma_quantile
from bobtaillab.stats.moments import expected_w, variance_ratio, variance_w
from bobtaillab.stats.order_stats import sample_order_stats_matrix, sample_sorted_uniforms
from bobtaillab.stats.params import MiningParams
from bobtaillab.stats.summary import ks_statistic, ks_two_sample, summarize, variance_std_error

logger = logging.getLogger(__name__)

K_GRID = (1, 2, 5, 10, 20, 40)
QUANTILE_PROBABILITIES = (1e-6, 0.01, 0.5, 0.9, 0.999999)
ROUND_TRIP_TOLERANCE = 1e-9
SAMPLER_DRAWS = 50_000
ORACLE_DRAWS = 5_000
ORACLE_HASHES = 2_000
MOMENT_DRAWS = 100_000
BLOCKTIME_DRAWS = 200_000
KS_CRITICAL_99 = 1.628
SIGMAS = 4.0


def _check(name: str, observed: float, expected: float, tolerance: float) -> CheckRow:
    passed = abs(observed - expected) <= tolerance
    row = CheckRow(check=name, passed=passed, observed=observed, expected=expected, tolerance=tolerance)
    level = logging.INFO if passed else logging.ERROR
    logger.log(level, f"{'ok  ' if passed else 'FAIL'} {name}: observed {observed:.6g}, expected {expected:.6g} +/- {tolerance:.3g}")
    return row


def check_gamma_round_trip() -> list[CheckRow]:
    rows = []
    for k in K_GRID:
        worst = max(abs(gamma_cdf(gamma_quantile(p, k, 1.0), k, 1.0) - p) for p in QUANTILE_PROBABILITIES)
        rows.append(_check(f"gamma-round-trip k={k}", worst, 0.0, ROUND_TRIP_TOLERANCE))
    return rows


def check_sampler(seed: int) -> list[CheckRow]:
    """Exponential-spacing V_k against Gamma(k, v) and against the sorted-uniform oracle"""
    rows = []
    for k in (1, 5):
        rng = make_rng(derive_seed(seed, k))
        v_k = sample_order_stats_matrix(k, 1.0, SAMPLER_DRAWS, rng)[:, k - 1]
        d = ks_statistic(v_k, lambda t: gamma_cdf(max(t, 0.0), k, 1.0))
        rows.append(_check(f"sampler-vs-gamma k={k}", d, 0.0, min(0.01, KS_CRITICAL_99 / math.sqrt(SAMPLER_DRAWS))))

        oracle = np.array(
            [sample_sorted_uniforms(ORACLE_HASHES, k, float(ORACLE_HASHES), rng)[k - 1] for _ in range(ORACLE_DRAWS)]
        )
        d = ks_two_sample(v_k, oracle)
        critical = KS_CRITICAL_99 * math.sqrt((SAMPLER_DRAWS + ORACLE_DRAWS) / (SAMPLER_DRAWS * ORACLE_DRAWS))
        rows.append(_check(f"sampler-vs-sorted-uniforms k={k}", d, 0.0, critical))
    return rows


def check_moments(seed: int) -> list[CheckRow]:
    rows = []
    for k in K_GRID:
        rng = make_rng(derive_seed(seed ^ 0xB0B, k))
        w = sample_order_stats_matrix(k, 1.0, MOMENT_DRAWS, rng).mean(axis=1)
        summary = summarize(w)
        rows.append(_check(f"mean-w k={k}", summary.mean, expected_w(k, 1.0), SIGMAS * summary.std_error))
        rows.append(_check(f"var-w k={k}", summary.variance, variance_w(k, 1.0), SIGMAS * variance_std_error(w)))
    return rows


def check_variance_ratio(seed: int) -> list[CheckRow]:
    base = float(draw_blocktimes(1, BLOCKTIME_DRAWS, make_rng(derive_seed(seed ^ 0xB7, 1))).var(ddof=1))
    rows = []
    for k in K_GRID[1:]:
        var_k = float(draw_blocktimes(k, BLOCKTIME_DRAWS, make_rng(derive_seed(seed ^ 0xB7, k))).var(ddof=1))
        expected = variance_ratio(k)
        rows.append(_check(f"variance-ratio k={k}", var_k / base, expected, 0.05 * expected))
    return rows


def check_ownership(seed: int, trials: int) -> list[CheckRow]:
    miners = [MinerSpec(id="a", x=0.25), MinerSpec(id="b", x=0.25), MinerSpec(id="c", x=0.5)]
    k = 10
    rewards = run_reward_experiment(miners, MiningParams.unit(k), RewardParams(R=1, B=1), trials, seed)
    rows = []
    for miner, row in zip(miners, rewards):
        se = math.sqrt(miner.x * (1 - miner.x) / (k * trials))
        rows.append(_check(f"ownership {miner.id} x={miner.x}", row.owned_fraction, miner.x, SIGMAS * se))
    return rows


def check_rank_time(seed: int, trials: int) -> list[CheckRow]:
    row = rank_time_correlation(MiningParams.unit(5), trials, seed)
    return [_check("rank-time-correlation k=5", row.correlation, 0.0, row.bound)]


CHECKS: Sequence[Callable[[int, int], list[CheckRow]]] = (
    lambda seed, trials: check_gamma_round_trip(),
    lambda seed, trials: check_sampler(seed),
    lambda seed, trials: check_moments(seed),
    lambda seed, trials: check_variance_ratio(seed),
    check_ownership,
    check_rank_time,
)


def run_selfcheck(seed: int, trials: int = 10_000) -> list[CheckRow]:
    """Every check, in a fixed order; the caller decides what a failure means"""
    rows: list[CheckRow] = []
    for check in CHECKS:
        rows.extend(check(seed, trials))
    failed = [r.check for r in rows if not r.passed]
    if failed:
        logger.error(f"{len(failed)} of {len(rows)} self-checks failed: {', '.join(failed)}")
    else:
        logger.info(f"All {len(rows)} self-checks passed")
    return rows
