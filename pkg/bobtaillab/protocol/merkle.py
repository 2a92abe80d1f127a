"""Merkle trees over 256-bit leaf digests.

Odd-width levels are padded by duplicating their last node, so a singleton
set has an empty path and its root is the leaf itself. The root of an empty
set is 0.
"""

from collections.abc import Sequence

from bobtaillab.core import DomainError, require
from bobtaillab.helpers.hashers import digest
from bobtaillab.protocol._codec import Writer
from bobtaillab.protocol.types import Bounty, Transaction


def _parent(left: int, right: int) -> int:
    return digest.digest(Writer().u256(left).u256(right).getvalue())


def _levels(leaves: Sequence[int]) -> list[list[int]]:
    level = list(leaves)
    levels = [level]
    while len(level) > 1:
        if len(level) % 2:
            level = [*level, level[-1]]
        level = [_parent(level[i], level[i + 1]) for i in range(0, len(level), 2)]
        levels.append(level)
    return levels


def merkle_root(leaves: Sequence[int]) -> int:
    if not leaves:
        return 0
    return _levels(leaves)[-1][0]


def merkle_path(leaves: Sequence[int], index: int) -> tuple[int, ...]:
    """Sibling digests from leaf ``index`` up to the root"""
    require(0 <= index < len(leaves), f"leaf index {index} out of range for {len(leaves)} leaves")
    path = []
    for level in _levels(leaves)[:-1]:
        sibling = index ^ 1
        path.append(level[sibling] if sibling < len(level) else level[index])
        index //= 2
    return tuple(path)


def verify_path(leaf: int, index: int, path: Sequence[int], root: int) -> bool:
    node = leaf
    for sibling in path:
        node = _parent(sibling, node) if index & 1 else _parent(node, sibling)
        index //= 2
    return index == 0 and node == root


def transaction_root(transactions: Sequence[Transaction]) -> int:
    return merkle_root([tx.tx_hash for tx in transactions])


def make_bounty(transactions: Sequence[Transaction], tx: Transaction) -> Bounty:
    """Bounty proving that the set ``transactions`` contains ``tx``"""
    leaves = [t.tx_hash for t in transactions]
    try:
        index = leaves.index(tx.tx_hash)
    except ValueError:
        raise DomainError("transaction is not part of the set") from None
    return Bounty(
        target_merkle_root=merkle_root(leaves),
        transaction=tx,
        leaf_index=index,
        merkle_path=merkle_path(leaves, index),
    )


def verify_bounty(bounty: Bounty, root: int) -> bool:
    if bounty.target_merkle_root != root:
        return False
    return verify_path(bounty.transaction.tx_hash, bounty.leaf_index, bounty.merkle_path, root)
