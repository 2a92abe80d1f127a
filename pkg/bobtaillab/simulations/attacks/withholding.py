"""Proof withholding by a miner hoping to author the block or starve honest bonuses.

One trial is one block height, time in hash intervals with ``v`` normalised to
1. Proofs below ``k t_k`` arrive at rate ``k t_k`` per interval, owned by the
attacker with probability ``q`` and otherwise by one of ``n_honest`` equal
honest miners. Honest proofs reach everyone at once; a proof's support is the
lowest value its owner knew when it was found.

The attacker keeps her proofs private until she can assemble a block as the
1OS author, or until the k lowest public proofs average within
``release_factor`` of ``t_k``; then she publishes them and mines openly.
Honest authors fill their package with their own proofs first and the rest in
the order they were received.
"""

import bisect
import heapq
import logging
import math
from collections.abc import Sequence
from functools import partial
from itertools import islice
from typing import NamedTuple

import numpy as np

from bobtaillab.core import require
from bobtaillab.protocol.types import RewardParams
from bobtaillab.schemas.experiments import AttackConfig
from bobtaillab.schemas.results import AttackRow
from bobtaillab.simulations._runner import run_trials, warn_if_few_trials
from bobtaillab.stats.summary import summarize

logger = logging.getLogger(__name__)

ATTACKER = -1


class HeldProof(NamedTuple):
    value: float
    owner: int
    support: float
    received: int


class Earnings(NamedTuple):
    attacker_r: float
    attacker_b: float
    honest_r: float
    honest_b: float
    attacker_authored: bool


def greedy_package(leader: HeldProof, pool: Sequence[HeldProof], k: int, limit: float) -> list[HeldProof] | None:
    """Leader plus k-1 proofs taken in ``pool`` order whenever the rest can still fit ``limit``"""
    if k == 1:
        return [leader] if leader.value <= limit else None
    remaining = sorted(p.value for p in pool)
    if len(remaining) < k - 1 or leader.value + math.fsum(remaining[: k - 1]) > limit:
        return None
    chosen = [leader]
    total = leader.value
    for proof in pool:
        slots = k - len(chosen)
        if slots == 0:
            break
        i = bisect.bisect_left(remaining, proof.value)
        del remaining[i]
        if total + proof.value + math.fsum(remaining[: slots - 1]) <= limit:
            chosen.append(proof)
            total += proof.value
    return chosen


def _priority(owner: int, proofs: Sequence[HeldProof]) -> list[HeldProof]:
    return sorted(proofs, key=lambda p: (p.owner != owner, p.received))


def _k_lowest_sum(values: list[float], k: int) -> float:
    return math.fsum(values[:k]) if len(values) >= k else math.inf


def _earnings(package: Sequence[HeldProof], reward: RewardParams, attacker_authored: bool) -> Earnings:
    R, B = float(reward.R), float(reward.B)
    v1 = package[0].value
    a_r = a_b = h_r = h_b = 0.0
    for i, proof in enumerate(package):
        bonus = B if i == 0 or proof.support == v1 else 0.0
        if proof.owner == ATTACKER:
            a_r, a_b = a_r + R, a_b + bonus
        else:
            h_r, h_b = h_r + R, h_b + bonus
    return Earnings(a_r, a_b, h_r, h_b, attacker_authored)


def withholding_trial(
    cfg: AttackConfig,
    reward: RewardParams,
    n_honest: int,
    release_factor: float,
    rng: np.random.Generator,
    trial: int = 0,
) -> Earnings:
    k = cfg.k
    limit = k * (k + 1) / 2
    public: list[HeldProof] = []
    public_values: list[float] = []
    withheld: list[HeldProof] = []
    released = cfg.q == 0.0
    seq = 0

    def publish(proof: HeldProof) -> None:
        public.append(proof)
        bisect.insort(public_values, proof.value)

    while True:
        value = float(rng.uniform(0.0, limit))
        owner = ATTACKER if rng.random() < cfg.q else int(rng.integers(n_honest))
        public_min = public_values[0] if public_values else math.inf
        if owner == ATTACKER and not released:
            known = min(public_min, withheld[0].value if withheld else math.inf)
            bisect.insort(withheld, HeldProof(value, owner, known, seq))
        else:
            publish(HeldProof(value, owner, public_min, seq))
        seq += 1

        if not released:
            if withheld and withheld[0].value < (public_values[0] if public_values else math.inf):
                lowest = list(islice(heapq.merge(public_values, (p.value for p in withheld)), k))
                if _k_lowest_sum(lowest, k) <= limit:
                    leader = withheld[0]
                    pool = _priority(ATTACKER, [p for p in (*public, *withheld) if p is not leader])
                    package = greedy_package(leader, pool, k, limit)
                    if package is not None:
                        return _earnings(package, reward, True)
            if _k_lowest_sum(public_values, k) <= release_factor * limit:
                logger.debug(f"Trial {trial}: attacker releases {len(withheld)} withheld proofs")
                for proof in sorted(withheld, key=lambda p: p.received):
                    publish(proof._replace(received=seq))
                    seq += 1
                withheld.clear()
                released = True

        if _k_lowest_sum(public_values, k) > limit:
            continue
        leader = min(public, key=lambda p: p.value)
        pool = _priority(leader.owner, [p for p in public if p is not leader])
        package = greedy_package(leader, pool, k, limit)
        if package is not None:
            return _earnings(package, reward, leader.owner == ATTACKER)


def simulate_withholding(
    cfg: AttackConfig,
    reward: RewardParams,
    *,
    n_honest: int = 10,
    release_factor: float = 1.05,
    jobs: int = 1,
) -> list[AttackRow]:
    """Per-party R, B and total earnings per block, with each party's all-honest baseline x k (R + B/2)"""
    require(0.0 <= cfg.q < 1.0, f"attacker power must lie in [0, 1), got {cfg.q}")
    require(n_honest >= 1, f"need at least one honest miner, got {n_honest}")
    require(release_factor >= 1.0, f"release factor must be at least 1, got {release_factor}")
    warn_if_few_trials(cfg.trials, "withholding")
    outcomes = run_trials(partial(withholding_trial, cfg, reward, n_honest, release_factor), cfg.trials, cfg.seed, jobs=jobs)
    data = np.array([o[:4] for o in outcomes], dtype=float)

    series = {
        "attacker_r": data[:, 0],
        "attacker_b": data[:, 1],
        "attacker_total": data[:, 0] + data[:, 1],
        "honest_r": data[:, 2],
        "honest_b": data[:, 3],
        "honest_total": data[:, 2] + data[:, 3],
        "attacker_authored": np.array([o.attacker_authored for o in outcomes], dtype=float),
    }
    rows = [
        AttackRow.from_summary(summarize(values), experiment="withholding", q=cfg.q, z=cfg.z, k=cfg.k, seed=cfg.seed, metric=metric)
        for metric, values in series.items()
    ]
    for party, x in (("attacker", cfg.q), ("honest", cfg.honest_power)):
        baseline = reward.expected_honest_total(x, cfg.k)
        rows.append(
            AttackRow(
                experiment="withholding",
                q=cfg.q,
                z=cfg.z,
                k=cfg.k,
                trials=cfg.trials,
                seed=cfg.seed,
                metric=f"{party}_baseline",
                value=baseline,
                ci_low=baseline,
                ci_high=baseline,
            )
        )
    logger.info(
        f"withholding q={cfg.q} k={cfg.k}: attacker {series['attacker_total'].mean():.3f} "
        f"(baseline {reward.expected_honest_total(cfg.q, cfg.k):.3f}), honest {series['honest_total'].mean():.3f}"
    )
    return rows
