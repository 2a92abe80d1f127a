"""Coinbase allocation.

Every proof earns ``R``. A proof whose support is the 1OS earns ``B`` on top,
and the 1OS author is paid ``B`` for the 1OS itself. A proof implicated by a
bounty forfeits everything it would have earned to the 1OS author.
"""

import logging
from collections import defaultdict
from decimal import Decimal

from bobtaillab.core import BountyError
from bobtaillab.protocol.merkle import verify_bounty
from bobtaillab.protocol.transactions import conflicts_any
from bobtaillab.protocol.types import Block, CoinbaseOutput, RewardParams

logger = logging.getLogger(__name__)


def implicated_proofs(block: Block) -> set[int]:
    """Indices of proofs whose transaction set a bounty shows to conflict with T_1"""
    roots: dict[int, list[int]] = defaultdict(list)
    for i, proof in enumerate(block.proofs):
        roots[proof.merkle_root].append(i)
    implicated: set[int] = set()
    for bounty in block.bounties:
        indices = [i for i in roots.get(bounty.target_merkle_root, []) if i > 0]
        if not indices:
            raise BountyError(f"bounty targets root {bounty.target_merkle_root:#x}, absent from the package")
        if not verify_bounty(bounty, bounty.target_merkle_root):
            raise BountyError(f"bounty path does not re-hash to {bounty.target_merkle_root:#x}")
        if not conflicts_any(bounty.transaction, block.transactions):
            raise BountyError(f"bounty transaction on utxo {bounty.transaction.utxo_id} conflicts with nothing in T_1")
        implicated.update(indices)
    return implicated


def allocate_rewards(block: Block, reward: RewardParams) -> dict[str, Decimal]:
    v1 = block.proofs[0].value
    author = block.proofs[0].address
    implicated = implicated_proofs(block)
    payouts: dict[str, Decimal] = defaultdict(Decimal)
    payouts[author] += reward.R + reward.B
    for i, proof in enumerate(block.proofs[1:], start=1):
        earned = reward.R + (reward.B if proof.support == v1 else Decimal(0))
        if i in implicated:
            logger.debug(f"Proof {i} of {proof.address} forfeits {earned} to {author}")
            payouts[author] += earned
        else:
            payouts[proof.address] += earned
    return dict(payouts)


def total_payout(block: Block, reward: RewardParams) -> Decimal:
    """k R + B for the 1OS + B per proof supporting it"""
    v1 = block.proofs[0].value
    supporting = sum(1 for proof in block.proofs[1:] if proof.support == v1)
    return block.k * reward.R + (1 + supporting) * reward.B


def coinbase_outputs(payouts: dict[str, Decimal]) -> tuple[CoinbaseOutput, ...]:
    return tuple(CoinbaseOutput(address=a, amount=amount) for a, amount in sorted(payouts.items()) if amount > 0)
