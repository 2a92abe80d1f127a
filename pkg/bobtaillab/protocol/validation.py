import logging
from enum import Enum

from bobtaillab.core import BountyError
from bobtaillab.helpers.hashers import SignerBase, signer
from bobtaillab.helpers.pydantic import FrozenModel
from bobtaillab.protocol.assembly import package_limit
from bobtaillab.protocol.merkle import merkle_root, transaction_root
from bobtaillab.protocol.rewards import allocate_rewards
from bobtaillab.protocol.types import Block, RewardParams
from bobtaillab.stats.params import MiningParams

logger = logging.getLogger(__name__)


class RejectReason(str, Enum):
    STRUCTURE = "structure"
    ORDER = "order"
    PRIOR = "prior"
    HEADER = "header"
    TARGET = "target"
    SUPPORT = "support"
    SIGNATURE = "signature"
    NOT_LOWEST = "not_lowest"
    BOUNTY = "bounty"
    COINBASE = "coinbase"


class BlockVerdict(FrozenModel):
    accepted: bool
    reason: RejectReason | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    @classmethod
    def accept(cls) -> "BlockVerdict":
        return cls(accepted=True)

    @classmethod
    def reject(cls, reason: RejectReason, detail: str) -> "BlockVerdict":
        logger.debug(f"Block rejected ({reason.value}): {detail}")
        return cls(accepted=False, reason=reason, detail=detail)


def sign_header(block: Block, *, signer_backend: SignerBase = signer) -> Block:
    """Copy of ``block`` signed by the author of its lowest proof"""
    signature = signer_backend.sign(block.header.signing_bytes(), block.proofs[0].address)
    return Block(
        header=block.header,
        transactions=block.transactions,
        proofs=block.proofs,
        bounties=block.bounties,
        coinbase=block.coinbase,
        signature=signature,
    )


def verify_signature(block: Block, *, signer_backend: SignerBase = signer) -> bool:
    return signer_backend.verify(block.header.signing_bytes(), block.proofs[0].address, block.signature)


def validate_block(
    block: Block,
    params: MiningParams,
    reward: RewardParams,
    seen_min: int | None = None,
    *,
    signer_backend: SignerBase = signer,
) -> BlockVerdict:
    """Check a block against the consensus rules; the first failed rule names the verdict"""
    if block.k != params.k:
        return BlockVerdict.reject(RejectReason.STRUCTURE, f"package has {block.k} proofs, expected {params.k}")
    if not block.transactions:
        return BlockVerdict.reject(RejectReason.STRUCTURE, "block carries no transaction set")

    values = block.values
    if any(b <= a for a, b in zip(values, values[1:])):
        return BlockVerdict.reject(RejectReason.ORDER, "proof values are not strictly ascending")

    first = block.proofs[0]
    header = block.header
    if any(p.prior != header.prior for p in block.proofs):
        return BlockVerdict.reject(RejectReason.PRIOR, "proofs do not share the header's prior")

    if (
        header.transaction_root != first.merkle_root
        or header.support != first.support
        or header.nonce_body().commitment != first.nonce_commitment
    ):
        return BlockVerdict.reject(RejectReason.HEADER, "header fields do not match the lowest proof")
    if header.transaction_root != transaction_root(block.transactions):
        return BlockVerdict.reject(RejectReason.HEADER, "transaction root does not match the transaction set")
    if header.proof_root != merkle_root(values):
        return BlockVerdict.reject(RejectReason.HEADER, "proof root does not match the package")
    if header.bounty_root != merkle_root([b.bounty_hash for b in block.bounties]):
        return BlockVerdict.reject(RejectReason.HEADER, "bounty root does not match the bounties")

    if sum(values) > package_limit(params):
        return BlockVerdict.reject(RejectReason.TARGET, f"mean proof value exceeds t_k={params.t_k}")

    v1 = values[0]
    low = [i for i, p in enumerate(block.proofs[1:], start=1) if p.support < v1]
    if low:
        return BlockVerdict.reject(RejectReason.SUPPORT, f"proofs {low} have support below V_1")

    if not verify_signature(block, signer_backend=signer_backend):
        return BlockVerdict.reject(RejectReason.SIGNATURE, f"signature does not verify for {first.address}")

    if seen_min is not None and seen_min < v1:
        return BlockVerdict.reject(RejectReason.NOT_LOWEST, "a lower proof than V_1 has been seen")

    try:
        payouts = allocate_rewards(block, reward)
    except BountyError as e:
        return BlockVerdict.reject(RejectReason.BOUNTY, str(e))
    expected = {a: amount for a, amount in payouts.items() if amount > 0}
    if block.payouts() != expected or len(block.coinbase) != len(expected):
        return BlockVerdict.reject(RejectReason.COINBASE, "coinbase does not match the reward allocation")

    return BlockVerdict.accept()
