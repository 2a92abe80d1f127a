"""Proof-package assembly.

The holder of the lowest proof (the 1OS) picks ``k - 1`` further proofs
that keep the package mean at or below ``t_k``. Among feasible packages it
takes the one paying it the most and, among those, the one with the earliest
average receipt time. Only proofs that support the 1OS are eligible.
"""

import logging
import math
from collections.abc import Sequence
from fractions import Fraction
from itertools import accumulate
from typing import Any, NamedTuple

from bobtaillab.core import DomainError
from bobtaillab.helpers.hashers import SignerBase, signer
from bobtaillab.helpers.pydantic import FrozenModel
from bobtaillab.protocol.merkle import merkle_root, transaction_root, verify_bounty
from bobtaillab.protocol.rewards import allocate_rewards, coinbase_outputs
from bobtaillab.protocol.transactions import conflicts_any
from bobtaillab.protocol.types import (
    Block,
    Bounty,
    Header,
    NonceBody,
    ProofSet,
    RewardParams,
    Transaction,
)
from bobtaillab.stats.params import MiningParams

logger = logging.getLogger(__name__)


class Candidate(NamedTuple):
    value: Any
    received_at: float
    reward: Any
    item: Any = None


def package_limit(params: MiningParams) -> int | Fraction:
    """Upper bound on the sum of the k proof values, k t_k, kept exact"""
    if isinstance(params.t_k, int):
        return params.k * params.t_k
    return params.k * Fraction(params.t_k)


def _suffix_prefix_sums(columns: Sequence[Any], width: int) -> list[list[Any]]:
    """For each start i, prefix sums of the ``width`` smallest entries of ``columns[i:]``"""
    table = []
    for i in range(len(columns)):
        smallest = sorted(columns[i:])[:width]
        table.append(list(accumulate(smallest, initial=0)))
    table.append([0])
    return table


def select_package(
    first: Candidate,
    candidates: Sequence[Candidate],
    k: int,
    limit: Any,
) -> tuple[Candidate, ...] | None:
    """Exact branch and bound over k-subsets containing ``first``.

    Maximises total reward, then minimises total receipt time, then prefers
    the lexicographically smallest value list. Returns the chosen candidates
    ascending by value, or ``None`` when no subset has value sum <= ``limit``.
    """
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    need = k - 1
    budget = limit - first.value
    if budget < 0:
        return None
    if need == 0:
        return (first,)
    order = sorted(candidates, key=lambda c: (-c.reward, c.received_at, c.value))
    n = len(order)
    if n < need:
        return None

    values = [c.value for c in order]
    times = [c.received_at for c in order]
    rewards = [c.reward for c in order]
    min_values = _suffix_prefix_sums(values, need)
    min_times = _suffix_prefix_sums(times, need)
    reward_prefix = list(accumulate(rewards, initial=0))

    best: tuple[Any, float, tuple[Any, ...]] | None = None
    best_pick: list[int] = []
    chosen: list[int] = []

    def visit(i: int, left: int, vsum: Any, rsum: Any, tsum: float) -> None:
        nonlocal best, best_pick
        if left == 0:
            key = (rsum, math.fsum(times[j] for j in chosen), tuple(sorted(values[j] for j in chosen)))
            if best is None or (-key[0], key[1], key[2]) < (-best[0], best[1], best[2]):
                best, best_pick = key, list(chosen)
            return
        if n - i < left:
            return
        if vsum + min_values[i][left] > budget:
            return
        if best is not None:
            reward_bound = rsum + reward_prefix[i + left] - reward_prefix[i]
            if reward_bound < best[0]:
                return
            if reward_bound == best[0] and tsum + min_times[i][left] > best[1]:
                return
        chosen.append(i)
        visit(i + 1, left - 1, vsum + values[i], rsum + rewards[i], tsum + times[i])
        chosen.pop()
        visit(i + 1, left, vsum, rsum, tsum)

    visit(0, need, 0, first.reward, 0.0)
    if best is None:
        return None
    return tuple(sorted([first, *(order[j] for j in best_pick)], key=lambda c: c.value))


class MinedProof(FrozenModel):
    """A proof the caller generated, with the nonce body behind its commitment"""

    proof: ProofSet
    nonce: NonceBody
    generated_at: float = 0.0


class ReceivedProof(FrozenModel):
    proof: ProofSet
    received_at: float = 0.0


def assemble_proof_package(
    own_proofs: Sequence[MinedProof],
    received: Sequence[ReceivedProof],
    params: MiningParams,
    reward: RewardParams,
    *,
    transactions: Sequence[Transaction],
    bounties: Sequence[Bounty] = (),
    seen_min: int | None = None,
    signer_backend: SignerBase = signer,
) -> Block | None:
    """Signed block candidate built around the caller's 1OS, or ``None``"""
    if not own_proofs:
        return None
    lowest_own = min(own_proofs, key=lambda m: m.proof.value)
    first = lowest_own.proof
    v1 = first.value
    if any(r.proof.value < v1 for r in received):
        logger.debug("Caller does not hold the lowest proof; not assembling")
        return None
    if seen_min is not None and seen_min < v1:
        logger.debug(f"A lower proof {seen_min:#x} has been seen; not assembling")
        return None
    if first.merkle_root != transaction_root(transactions):
        raise DomainError("the 1OS does not commit to the given transaction set")

    own_addresses = {m.proof.address for m in own_proofs}
    usable_bounties = {
        b.target_merkle_root: b
        for b in bounties
        if verify_bounty(b, b.target_merkle_root) and conflicts_any(b.transaction, transactions)
    }

    def caller_reward(proof: ProofSet) -> Any:
        if proof.address in own_addresses or proof.merkle_root in usable_bounties:
            return reward.R + (reward.B if proof.support == v1 else 0)
        return 0

    pool: dict[int, Candidate] = {}
    offers = [(m.proof, m.generated_at) for m in own_proofs] + [(r.proof, r.received_at) for r in received]
    for proof, at in offers:
        value = proof.value
        if value <= v1 or proof.prior != first.prior or proof.support < v1:
            continue
        if value in pool and pool[value].received_at <= at:
            continue
        pool[value] = Candidate(value=value, received_at=at, reward=caller_reward(proof), item=proof)

    first_candidate = Candidate(value=v1, received_at=lowest_own.generated_at, reward=reward.R + reward.B, item=first)
    picked = select_package(first_candidate, list(pool.values()), params.k, package_limit(params))
    if picked is None:
        logger.debug(f"No feasible package of {params.k} proofs among {len(pool) + 1} candidates")
        return None

    proofs = tuple(c.item for c in picked)
    roots = {p.merkle_root for p in proofs[1:]}
    used = tuple(b for root, b in sorted(usable_bounties.items()) if root in roots)
    header = Header.from_proof(
        first,
        lowest_own.nonce,
        proof_root=merkle_root([p.value for p in proofs]),
        bounty_root=merkle_root([b.bounty_hash for b in used]),
    )
    draft = Block(header=header, transactions=tuple(transactions), proofs=proofs, bounties=used)
    coinbase = coinbase_outputs(allocate_rewards(draft, reward))
    signature = signer_backend.sign(header.signing_bytes(), first.address)
    return Block(
        header=header,
        transactions=draft.transactions,
        proofs=proofs,
        bounties=used,
        coinbase=coinbase,
        signature=signature,
    )
