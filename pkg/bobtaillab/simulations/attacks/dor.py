"""Denial of reward: seeding two conflicting transactions to split the miners.

At ``release`` (a fraction of the interval) the attacker sends transaction A
to a ``split`` share of the miners and a conflicting B to the rest; each side
sees the other transaction ``latency`` seconds later. The k lowest proofs of
the interval are found at uniform times by uniformly chosen miners. A proof
whose transaction set conflicts with the 1OS author's is forfeited.

Under the naive policy a miner keeps the first transaction it received. Under
the grace-period convention every miner switches to the canonical choice of
``select_canonical_tx`` once both are known, so only proofs found inside the
latency window can disagree.
"""

import logging
from functools import partial

import numpy as np

from bobtaillab.core import require
from bobtaillab.protocol.transactions import select_canonical_tx
from bobtaillab.protocol.types import Transaction
from bobtaillab.schemas.results import AttackRow
from bobtaillab.simulations._runner import run_batched, warn_if_few_trials
from bobtaillab.stats.summary import summarize

logger = logging.getLogger(__name__)

# labels: 0 = neither transaction, 1 = A, 2 = B
SEEDED = (Transaction(utxo_id=1, fee=1, payload=b"A"), Transaction(utxo_id=1, fee=1, payload=b"B"))


def conflict_table(transactions: tuple[Transaction, Transaction] = SEEDED) -> np.ndarray:
    table = np.zeros((3, 3), dtype=bool)
    for i, a in enumerate(transactions, start=1):
        for j, b in enumerate(transactions, start=1):
            table[i, j] = a.conflicts_with(b)
    return table


def canonical_labels(latency: float, grace: float, transactions: tuple[Transaction, Transaction] = SEEDED) -> tuple[int, int]:
    """Label each side mines once both transactions are known under the grace-period convention"""
    a, b = transactions
    after_a = select_canonical_tx(a, b, latency, grace=grace)
    after_b = select_canonical_tx(b, a, latency, grace=grace)
    return 1 if after_a == a else 2, 1 if after_b == a else 2


def _dor_batch(
    k: int,
    split: float,
    release: float,
    window: float,
    canonical: tuple[int, int],
    table: np.ndarray,
    rng: np.random.Generator,
    count: int,
) -> np.ndarray:
    side_a = rng.random((count, k)) < split
    times = rng.random((count, k))
    seeded = times >= release
    first = np.where(side_a, 1, 2)
    naive = np.where(seeded, first, 0)
    settled = np.where(side_a, canonical[0], canonical[1])
    convention = np.where(times < release + window, naive, settled)

    out = np.empty((count, 2))
    for column, labels in enumerate((naive, convention)):
        lost = table[labels[:, 1:], labels[:, :1]]
        out[:, column] = lost.mean(axis=1)
    return out


def simulate_dor(
    split: float,
    latency: float,
    grace: float,
    k: int,
    trials: int,
    seed: int,
    *,
    release: float = 0.0,
    T: float = 600.0,
    jobs: int = 1,
) -> list[AttackRow]:
    """Fraction of non-1OS proofs forfeited under the naive policy and under the grace-period convention.

    Rows carry ``split`` in the ``q`` column.
    """
    require(0.0 <= split <= 1.0, f"split must lie in [0, 1], got {split}")
    require(latency >= 0.0, f"latency must be non-negative, got {latency}")
    require(grace >= 0.0, f"grace period must be non-negative, got {grace}")
    require(k >= 2, f"forfeiture needs a package with k >= 2, got {k}")
    require(0.0 <= release < 1.0, f"release must lie in [0, 1), got {release}")
    require(T > 0.0, f"T must be positive, got {T}")
    warn_if_few_trials(trials, "dor")

    canonical = canonical_labels(latency, grace)
    fn = partial(_dor_batch, k, split, release, latency / T, canonical, conflict_table())
    data = run_batched(fn, trials, seed, jobs=jobs)

    rows = [
        AttackRow.from_summary(summarize(data[:, i]), experiment="dor", q=split, z=0, k=k, seed=seed, metric=metric)
        for i, metric in enumerate(("forfeited_naive", "forfeited_convention"))
    ]
    predicted = 2.0 * split * (1.0 - split) * (1.0 - release) ** 2
    rows.append(
        AttackRow(
            experiment="dor",
            q=split,
            z=0,
            k=k,
            trials=trials,
            seed=seed,
            metric="predicted_naive",
            value=predicted,
            ci_low=predicted,
            ci_high=predicted,
        )
    )
    logger.info(
        f"dor split={split} latency={latency}s grace={grace}s: forfeited {rows[0].value:.4f} naive, "
        f"{rows[1].value:.4f} with the grace period"
    )
    return rows
