"""Proof and block propagation over a complete graph with constant delay.

Times are in seconds. With ``v`` normalised to 1, proofs that can matter lie
below ``min(k t_k, x)`` where ``x`` is the broadcast threshold; they are found
network-wide as a Poisson process of rate ``cap / T`` per second, each by a
uniformly chosen node, and reach every other node ``tau`` seconds later.

A trial covers one block height and runs until every node has accepted a
block. Each proof is tethered to the lowest value its finder knew, and with
the package rules on a node only releases a block when it owns the lowest
proof it has seen and every other proof in the package has support at or
above that 1OS. A receiver accepts a block when its 1OS is no higher than the
lowest proof the receiver had seen. The trial is an orphan when two or more
blocks were accepted somewhere. With k = 1 a block is a bare proof and
blocks compete as in existing chains.
"""

import bisect
import logging
import math
from functools import lru_cache, partial
from typing import NamedTuple

import numpy as np

from bobtaillab.core import feature_flags, require
from bobtaillab.helpers.pydantic import FrozenModel
from bobtaillab.helpers.rng import derive_seed, trial_rng
from bobtaillab.protocol.fork_choice import fork_choice
from bobtaillab.protocol.types import ChainView
from bobtaillab.schemas.results import OrphanRow, TrafficRow
from bobtaillab.simulations._runner import run_batched, run_trials, warn_if_few_trials
from bobtaillab.simulations.events import EventKind, EventQueue, SimEvent
from bobtaillab.stats.moments import broadcast_threshold, chernoff_message_bound, orphan_rate_bound
from bobtaillab.stats.params import MiningParams
from bobtaillab.stats.summary import proportion_summary, summarize

logger = logging.getLogger(__name__)

TRAFFIC_TAIL_FACTOR = 1.9


class SeenProof(NamedTuple):
    value: float
    owner: int
    support: float
    found_at: float


class NodeState:
    """What one node has seen at the current height"""

    def __init__(self, node_id: int, proofs: list[SeenProof] | None = None):
        self.node_id = node_id
        self.proofs: list[SeenProof] = list(proofs or [])
        self.receipts: list[tuple[float, float]] = []
        self.settled = False

    @property
    def lowest(self) -> float:
        return self.proofs[0].value if self.proofs else math.inf

    def receive(self, proof: SeenProof, at: float) -> None:
        i = bisect.bisect_left(self.proofs, proof)
        if i < len(self.proofs) and self.proofs[i] == proof:
            return
        self.proofs.insert(i, proof)
        self.receipts.append((at, proof.value))

    def package(self, k: int, limit: float, *, rules: bool) -> tuple[SeenProof, ...] | None:
        """The k proofs of a block this node may release now, led by one of its own"""
        if rules:
            if not self.proofs or self.proofs[0].owner != self.node_id:
                return None
            head = self.proofs[0]
            rest = [p for p in self.proofs[1:] if p.support >= head.value][: k - 1]
            chosen = (head, *rest)
        else:
            start = next((i for i, p in enumerate(self.proofs) if p.owner == self.node_id), None)
            if start is None:
                return None
            chosen = tuple(self.proofs[start:start + k])
        if len(chosen) < k or math.fsum(p.value for p in chosen) > limit:
            return None
        return chosen


class ReleasedBlock(FrozenModel):
    author: int
    time: float
    values: tuple[float, ...]
    owners: tuple[int, ...]
    supports: tuple[float, ...]
    found_at: tuple[float, ...]
    valid_at: int = 0

    @property
    def w_k(self) -> float:
        return math.fsum(self.values) / len(self.values)

    @classmethod
    def assemble(cls, author: int, time: float, proofs: tuple[SeenProof, ...]) -> "ReleasedBlock":
        return cls(
            author=author,
            time=time,
            values=tuple(p.value for p in proofs),
            owners=tuple(p.owner for p in proofs),
            supports=tuple(p.support for p in proofs),
            found_at=tuple(p.found_at for p in proofs),
        )


class OrphanTrial(FrozenModel):
    trial: int
    orphan: bool
    blocks: list[ReleasedBlock]
    winner: int | None = None
    proofs: int = 0
    trace: list[str] | None = None
    trace_digest: str | None = None


class OrphanConfig(FrozenModel):
    k: int
    tau: float
    T: float
    n_miners: int = 20
    rules: bool = True
    p: float = 0.999999
    trace: bool = False


@lru_cache(maxsize=256)
def proof_cap(k: int, p: float) -> float:
    """Largest normalised proof value worth simulating: min(k t_k, broadcast threshold)"""
    params = MiningParams.unit(k)
    x = broadcast_threshold(p, params).x_threshold / params.v
    return min(k * params.t_k / params.v, x)


def run_orphan_trial(config: OrphanConfig, rng: np.random.Generator, trial: int = 0) -> OrphanTrial:
    k, tau, n = config.k, config.tau, config.n_miners
    rules = config.rules and k > 1
    cap = proof_cap(k, config.p)
    limit = k * (k + 1) / 2
    rate = cap / config.T
    queue = EventQueue(trace=config.trace)
    nodes = [NodeState(i) for i in range(n)]
    next_id = n
    blocks: list[ReleasedBlock] = []
    valid_at: list[int] = []
    proofs = 0

    def try_assemble(slot: int, now: float) -> None:
        nonlocal next_id
        node = nodes[slot]
        if node.settled:
            return
        chosen = node.package(k, limit, rules=rules)
        if chosen is None:
            return
        block = ReleasedBlock.assemble(node.node_id, now, chosen)
        blocks.append(block)
        valid_at.append(0)
        logger.debug(f"Trial {trial}: node {node.node_id} released a block at {now:.3f}s, V_1={block.values[0]:.6f}")
        queue.schedule(now + tau, EventKind.BLOCK_ARRIVAL, len(blocks) - 1, slot)
        # the author drops out; a fresh identity takes over its hash power and the proofs that reached it
        heard = [p for p in node.proofs if p.owner != node.node_id or p.found_at + tau <= now]
        nodes[slot] = NodeState(next_id, heard)
        next_id += 1

    def deliver_block(index: int, now: float) -> None:
        block = blocks[index]
        for node in nodes:
            if node.node_id == block.author:
                continue
            valid = not rules or block.values[0] <= node.lowest
            for proof in zip(block.values, block.owners, block.supports, block.found_at):
                node.receive(SeenProof(*proof), now)
            if valid:
                valid_at[index] += 1
                node.settled = True

    def handle(event: SimEvent) -> None:
        nonlocal proofs
        now = event.time
        if event.kind is EventKind.PROOF_FOUND:
            if not all(node.settled for node in nodes):
                queue.schedule(now + rng.exponential(1.0 / rate), EventKind.PROOF_FOUND, None, int(rng.integers(n)))
            slot = event.origin
            node = nodes[slot]
            if node.settled:
                # already mining on the next height
                return
            proof = SeenProof(float(rng.uniform(0.0, cap)), node.node_id, node.lowest, now)
            proofs += 1
            node.receive(proof, now)
            queue.schedule(now + tau, EventKind.PROOF_ARRIVAL, proof, slot)
            try_assemble(slot, now)
        elif event.kind is EventKind.PROOF_ARRIVAL:
            proof = event.payload
            for slot, node in enumerate(nodes):
                if node.node_id != proof.owner:
                    node.receive(proof, now)
                    try_assemble(slot, now)
        elif event.kind is EventKind.BLOCK_ARRIVAL:
            deliver_block(event.payload, now)

    queue.schedule(rng.exponential(1.0 / rate), EventKind.PROOF_FOUND, None, int(rng.integers(n)))
    queue.run(handle)

    released = [b.model_copy(update={"valid_at": count}) for b, count in zip(blocks, valid_at)]
    live = [b for b in released if b.valid_at > 0]
    winner = None
    if live:
        chains = [ChainView(w_values=(b.w_k,), space=cap) for b in live]
        best = fork_choice(chains)
        winner = live[chains.index(best)].author
    return OrphanTrial(
        trial=trial,
        orphan=len(live) >= 2,
        blocks=released,
        winner=winner,
        proofs=proofs,
        trace=queue.trace if config.trace else None,
        trace_digest=queue.trace_digest() if config.trace else None,
    )


def _orphan_flag(config: OrphanConfig, rng: np.random.Generator, trial: int) -> bool:
    return run_orphan_trial(config, rng, trial).orphan


def run_orphan_experiment(
    k: int,
    tau: float,
    T: float,
    n_miners: int,
    trials: int,
    seed: int,
    *,
    rules: bool | None = None,
    p: float = 0.999999,
    jobs: int = 1,
) -> OrphanRow:
    """Fraction of heights at which two or more blocks were released, with a Wilson 95% interval"""
    require(k >= 1, f"k must be positive, got {k}")
    require(tau >= 0.0, f"tau must be non-negative, got {tau!r}")
    require(T > 0.0, f"T must be positive, got {T!r}")
    require(n_miners >= 1, f"need at least one miner, got {n_miners}")
    if tau >= T:
        logger.warning(f"tau={tau} >= T={T}: propagation delay is not small against the block time")
    warn_if_few_trials(trials, "orphans")
    if rules is None:
        rules = feature_flags.orphan_prevention_rules
    config = OrphanConfig(k=k, tau=tau, T=T, n_miners=n_miners, rules=rules, p=p)
    flags = run_trials(partial(_orphan_flag, config), trials, derive_seed(seed, k), jobs=jobs)
    summary = proportion_summary(sum(flags), trials)
    logger.info(f"k={k}, tau={tau}, T={T}: orphan rate {summary.mean:.5f} [{summary.ci_low:.5f}, {summary.ci_high:.5f}]")
    return OrphanRow(
        k=k,
        tau=tau,
        T=T,
        n_miners=n_miners,
        rules=rules,
        trials=trials,
        seed=seed,
        orphan_rate=summary.mean,
        ci_low=summary.ci_low,
        ci_high=summary.ci_high,
        k1_bound=orphan_rate_bound(tau, T),
    )


def traced_orphan_trial(k: int, tau: float, T: float, n_miners: int, seed: int, *, rules: bool = True, p: float = 0.999999) -> OrphanTrial:
    """Trial 0 of ``run_orphan_experiment`` with its event trace recorded"""
    config = OrphanConfig(k=k, tau=tau, T=T, n_miners=n_miners, rules=rules, p=p, trace=True)
    return run_orphan_trial(config, trial_rng(derive_seed(seed, k), 0), 0)



def _traffic_batch(hashes: int, space: float, cap: float, x: float, k: int, rng: np.random.Generator, count: int) -> np.ndarray:
    """Per block: proofs announced, and whether its k lowest hashes were all announced"""
    found = rng.binomial(hashes, min(1.0, cap / space), size=count)
    values = rng.uniform(0.0, cap, size=int(found.sum()))
    block = np.repeat(np.arange(count), found)
    announced = np.bincount(block[values <= x], minlength=count)

    ordered = values[np.lexsort((values, block))]
    starts = np.cumsum(found) - found
    v_k = np.full(count, np.inf)
    enough = found >= k
    v_k[enough] = ordered[starts[enough] + k - 1]
    return np.column_stack((announced, v_k <= x))


def run_traffic_experiment(
    k: int,
    p: float,
    params: MiningParams,
    trials: int,
    seed: int,
    *,
    jobs: int = 1,
) -> TrafficRow:
    """Proofs announced per block when miners only send values below the broadcast threshold.

    Each block spans ``h / r`` hashes. Hash values up to the larger of ``x``
    and ``k t_k`` are drawn explicitly and a proof is announced when its value
    is at most ``x``. Coverage is the share of blocks whose k lowest hashes
    were all announced, which should be close to ``p``.
    """
    require(0.0 < p < 1.0, f"probability must be in (0, 1), got {p!r}")
    warn_if_few_trials(trials, "traffic")
    params = params.with_k(k)
    threshold = broadcast_threshold(p, params)
    x = threshold.x_threshold
    y = threshold.expected_announcements
    hashes = max(k, round(params.h / params.r))
    cap = min(float(params.S), max(x, k * float(params.t_k)))
    outcome = run_batched(
        partial(_traffic_batch, hashes, float(params.S), cap, x, k),
        trials,
        derive_seed(seed, k),
        jobs=jobs,
    )
    counts = outcome[:, 0].astype(float)
    coverage = float(outcome[:, 1].mean())
    summary = summarize(counts)
    tail = float((counts > TRAFFIC_TAIL_FACTOR * y).mean())
    q50, q99, q999 = (float(q) for q in np.quantile(counts, [0.5, 0.99, 0.999]))
    logger.info(f"k={k}: {summary.mean:.3f} announcements per block (predicted {y:.3f}), coverage {coverage:.6f}")
    return TrafficRow(
        k=k,
        p=p,
        trials=trials,
        seed=seed,
        x_threshold=x,
        mean=summary.mean,
        predicted=y,
        ci_low=summary.ci_low,
        ci_high=summary.ci_high,
        q50=q50,
        q99=q99,
        q999=q999,
        tail_fraction=tail,
        chernoff_bound=chernoff_message_bound(y, TRAFFIC_TAIL_FACTOR - 1.0),
        coverage=coverage,
    )
