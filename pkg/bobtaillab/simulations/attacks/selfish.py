"""Selfish mining with the classic lead-based policy, the attacker winning every race.

Both sides mine in continuous time. A side that switches parent, or that
finishes a block, starts its next block from scratch: with k > 1 proofs
accumulated on an abandoned parent are lost, which is where low-variance
block times hurt the attacker.
"""

import logging
from functools import partial

import numpy as np

from bobtaillab.core import require
from bobtaillab.schemas.experiments import AttackConfig
from bobtaillab.schemas.results import AttackRow
from bobtaillab.simulations._runner import run_trials, warn_if_few_trials
from bobtaillab.simulations.attacks.doublespend import DRAW_CHUNK
from bobtaillab.simulations.mining import draw_blocktimes
from bobtaillab.stats.summary import summarize

logger = logging.getLogger(__name__)


class _Restartable:
    """A side's next completion time, redrawn whenever it restarts"""

    def __init__(self, k: int, power: float, rng: np.random.Generator):
        self.k = k
        self.scale = 1.0 / power
        self.rng = rng
        self._pending: list[float] = []
        self.due = 0.0

    def restart(self, now: float) -> None:
        if not self._pending:
            self._pending = draw_blocktimes(self.k, DRAW_CHUNK, self.rng, scale=self.scale).tolist()
        self.due = now + self._pending.pop()


def selfish_trial(cfg: AttackConfig, horizon: int, rng: np.random.Generator, trial: int = 0) -> float:
    """Attacker share of main-chain blocks once ``horizon`` blocks are settled.

    At the horizon the attacker publishes its private chain, which overrides
    the honest tip; a race still open is won by the attacker's block.
    """
    if cfg.q == 0.0:
        return 0.0
    attacker = _Restartable(cfg.k, cfg.q, rng)
    honest = _Restartable(cfg.k, cfg.honest_power, rng)
    attacker.restart(0.0)
    honest.restart(0.0)
    lead = 0
    racing = False
    won = lost = 0

    while won + lost < horizon:
        if attacker.due < honest.due:
            now = attacker.due
            attacker.restart(now)
            if racing:
                # attacker extends its published block and takes both
                won += 2
                racing = False
                honest.restart(now)
            else:
                lead += 1
        else:
            now = honest.due
            honest.restart(now)
            if racing:
                # honest miners built on the attacker's block
                won += 1
                lost += 1
                racing = False
                attacker.restart(now)
            elif lead == 0:
                lost += 1
                attacker.restart(now)
            elif lead == 1:
                racing = True
                lead = 0
            elif lead == 2:
                won += 2
                lead = 0
            else:
                won += 1
                lead -= 1
    won += lead + int(racing)
    return won / (won + lost)


def simulate_selfish_mining(cfg: AttackConfig, horizon: int = 2_000, *, jobs: int = 1) -> AttackRow:
    """Attacker's mean share of main-chain blocks; honest mining would earn ``q``"""
    require(0.0 <= cfg.q < 1.0, f"attacker power must lie in [0, 1), got {cfg.q}")
    require(horizon >= 1, f"horizon must be positive, got {horizon}")
    warn_if_few_trials(cfg.trials, "selfish")
    shares = run_trials(partial(selfish_trial, cfg, horizon), cfg.trials, cfg.seed, jobs=jobs)
    summary = summarize(shares)
    logger.info(f"selfish q={cfg.q} k={cfg.k}: attacker share {summary.mean:.4f} (honest baseline {cfg.q})")
    return AttackRow.from_summary(summary, experiment="selfish", q=cfg.q, z=cfg.z, k=cfg.k, seed=cfg.seed, metric="attacker_share")
