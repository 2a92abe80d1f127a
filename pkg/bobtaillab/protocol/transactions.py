from collections.abc import Sequence

from bobtaillab.core import require
from bobtaillab.protocol.types import Transaction

DEFAULT_GRACE_SECONDS = 5.0


def select_canonical_tx(
    first: Transaction,
    second: Transaction,
    receipt_gap: float,
    *,
    grace: float = DEFAULT_GRACE_SECONDS,
) -> Transaction:
    """Which of two conflicting transactions to mine.

    ``second`` arrived ``receipt_gap`` seconds after ``first``. A late second
    transaction is discarded; otherwise the higher fee wins and equal fees go
    to the lower hash.
    """
    require(receipt_gap >= 0.0, f"receipt gap must be non-negative, got {receipt_gap!r}")
    require(grace >= 0.0, f"grace period must be non-negative, got {grace!r}")
    if receipt_gap > grace:
        return first
    if first.fee != second.fee:
        return first if first.fee > second.fee else second
    return first if first.tx_hash <= second.tx_hash else second


def conflicts_any(tx: Transaction, transactions: Sequence[Transaction]) -> bool:
    return any(tx.conflicts_with(other) for other in transactions)
