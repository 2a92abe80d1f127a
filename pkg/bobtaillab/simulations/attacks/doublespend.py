"""Doublespend race between a private attacker branch and the honest branch.

Each side mines alone: its block times are Y_k draws scaled by the inverse of
its hash share. The merchant waits for ``z`` confirmations, so the attack
succeeds once the attacker branch holds at least ``z + 1`` blocks and is
strictly longer than the honest one. It is abandoned when the honest branch
leads by the stop margin (``3z + 5`` by default).

With proof reuse enabled the first block of each branch is mined from a
shared proof stream: a side may build on the other side's proofs that lie
above its own lowest proof.
"""

import bisect
import logging
import math
from functools import partial

import numpy as np

from bobtaillab.core import feature_flags, require
from bobtaillab.schemas.experiments import AttackConfig
from bobtaillab.schemas.results import AttackRow
from bobtaillab.simulations._runner import run_trials, warn_if_few_trials
from bobtaillab.simulations.mining import draw_blocktimes
from bobtaillab.stats.summary import proportion_summary

logger = logging.getLogger(__name__)

DRAW_CHUNK = 64


class _BlockClock:
    """Successive block times of one side, drawn in chunks"""

    def __init__(self, k: int, power: float, rng: np.random.Generator, start: float = 0.0):
        self.k = k
        self.scale = 1.0 / power
        self.rng = rng
        self.time = start
        self._pending: list[float] = []

    def next(self) -> float:
        if not self._pending:
            self._pending = draw_blocktimes(self.k, DRAW_CHUNK, self.rng, scale=self.scale).tolist()[::-1]
        self.time += self._pending.pop()
        return self.time


def shared_first_blocks(k: int, q: float, rng: np.random.Generator) -> tuple[float, float]:
    """Times at which each side completes its first block when proofs are shared.

    Proofs below ``k t_k`` arrive at rate ``k t_k`` per interval, owned by the
    attacker with probability ``q``. A side's package is its own lowest proof
    followed by the lowest proofs of either side above it.
    """
    cap = k * (k + 1) / 2
    proofs: list[tuple[float, bool]] = []
    lowest: dict[bool, float] = {}
    done: dict[bool, float] = {}
    clock = 0.0
    while len(done) < 2:
        clock += rng.exponential(1.0 / cap)
        value = float(rng.uniform(0.0, cap))
        side = bool(rng.random() < q)
        bisect.insort(proofs, (value, side))
        lowest[side] = min(value, lowest.get(side, math.inf))
        for s, own_min in lowest.items():
            if s in done:
                continue
            start = bisect.bisect_left(proofs, (own_min, s))
            package = proofs[start:start + k]
            if len(package) == k and math.fsum(v for v, _ in package) <= cap:
                done[s] = clock
    return done[True], done[False]


def doublespend_trial(cfg: AttackConfig, reuse: bool, rng: np.random.Generator, trial: int = 0) -> bool:
    if cfg.q == 0.0:
        return False
    margin = cfg.resolved_stop_margin
    attacker = _BlockClock(cfg.k, cfg.q, rng)
    honest = _BlockClock(cfg.k, cfg.honest_power, rng)
    if reuse:
        attacker.time, honest.time = shared_first_blocks(cfg.k, cfg.q, rng)
        next_attacker, next_honest = attacker.time, honest.time
    else:
        next_attacker, next_honest = attacker.next(), honest.next()

    a_len = h_len = 0
    while True:
        if next_attacker < next_honest:
            a_len += 1
            next_attacker = attacker.next()
        else:
            h_len += 1
            next_honest = honest.next()
        if a_len >= cfg.z + 1 and a_len > h_len:
            return True
        if h_len - a_len >= margin:
            return False


def simulate_doublespend(cfg: AttackConfig, *, reuse_first_block: bool | None = None, jobs: int = 1) -> AttackRow:
    """Fraction of trials in which the attacker branch overtakes after z confirmations"""
    require(0.0 <= cfg.q < 1.0, f"attacker power must lie in [0, 1), got {cfg.q}")
    warn_if_few_trials(cfg.trials, "doublespend")
    if reuse_first_block is None:
        reuse_first_block = feature_flags.reuse_first_block_proofs
    wins = run_trials(partial(doublespend_trial, cfg, reuse_first_block), cfg.trials, cfg.seed, jobs=jobs)
    summary = proportion_summary(sum(wins), cfg.trials)
    logger.info(f"doublespend q={cfg.q} z={cfg.z} k={cfg.k}: success {summary.mean:.4f}")
    return AttackRow.from_summary(summary, experiment="doublespend", q=cfg.q, z=cfg.z, k=cfg.k, seed=cfg.seed, metric="success")
