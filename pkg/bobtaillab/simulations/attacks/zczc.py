"""Zero-confirmation doublespend by mining proofs over a conflicting transaction set.

Fixed-interval model: the k lowest proofs of one interval, each the attacker's
with probability ``q`` and found at a uniform time. The attacker's proofs
carry a transaction set that conflicts with the honest one. The attacker
supports the true 1OS like anyone else, but honest miners never take an
attacker proof as support.

With the forfeiture rule the 1OS author attaches a bounty for every proof
whose transaction set conflicts with its own and collects that proof's
reward. Without it, conflicting proofs keep their earnings.
"""

import logging
from functools import partial

import numpy as np

from bobtaillab.core import require
from bobtaillab.protocol.types import RewardParams
from bobtaillab.schemas.experiments import AttackConfig
from bobtaillab.schemas.results import AttackRow
from bobtaillab.simulations._runner import run_batched, warn_if_few_trials
from bobtaillab.stats.summary import summarize

logger = logging.getLogger(__name__)

ZCZC_COLUMNS = (
    "attacker_with_rule",
    "attacker_without_rule",
    "attacker_honest",
    "honest_with_rule",
    "forfeitures",
    "payout",
)


def _zczc_batch(k: int, q: float, R: float, B: float, rng: np.random.Generator, count: int) -> np.ndarray:
    attacker = rng.random((count, k)) < q
    times = rng.random((count, k))
    after = times > times[:, :1]
    after[:, 0] = True
    attacker_leads = attacker[:, :1]

    # an honest proof behind an attacker 1OS names some other support
    bonus = after & (attacker | ~attacker_leads)
    earned = R + B * bonus
    honest_earned = R + B * after

    attacker_sum = (earned * attacker).sum(axis=1)
    payout = earned.sum(axis=1)
    leads = attacker_leads[:, 0]

    out = np.empty((count, len(ZCZC_COLUMNS)))
    out[:, 0] = np.where(leads, payout, 0.0)
    out[:, 1] = attacker_sum
    out[:, 2] = (honest_earned * attacker).sum(axis=1)
    out[:, 3] = np.where(leads, 0.0, payout)
    out[:, 4] = np.where(leads, (~attacker).sum(axis=1), attacker.sum(axis=1))
    out[:, 5] = payout
    return out


def simulate_zczc(cfg: AttackConfig, reward: RewardParams, *, jobs: int = 1) -> list[AttackRow]:
    """Attacker earnings per block with and without forfeiture, against mining honestly"""
    require(0.0 <= cfg.q < 1.0, f"attacker power must lie in [0, 1), got {cfg.q}")
    warn_if_few_trials(cfg.trials, "zczc")
    R, B = float(reward.R), float(reward.B)
    data = run_batched(partial(_zczc_batch, cfg.k, cfg.q, R, B), cfg.trials, cfg.seed, jobs=jobs)
    rows = [
        AttackRow.from_summary(summarize(data[:, i]), experiment="zczc", q=cfg.q, z=cfg.z, k=cfg.k, seed=cfg.seed, metric=metric)
        for i, metric in enumerate(ZCZC_COLUMNS)
    ]
    with_rule, honest = rows[0].value, rows[2].value
    logger.info(f"zczc q={cfg.q} k={cfg.k}: attacker {with_rule:.3f} with forfeiture, {honest:.3f} mining honestly")
    return rows
