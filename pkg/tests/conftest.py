import logging
from collections.abc import Iterator, Sequence
from decimal import Decimal

import numpy as np
import pytest

from bobtaillab.helpers.rng import make_rng
from bobtaillab.protocol import (
    Block,
    Bounty,
    Header,
    MinedProof,
    NonceBody,
    ProofSet,
    ReceivedProof,
    RewardParams,
    Transaction,
    merkle_root,
    sign_header,
    transaction_root,
)
from bobtaillab.stats import MiningParams

PRIOR = 0x0B0B7A11
NO_SUPPORT = (1 << 256) - 1
HONEST_TXS = (Transaction(utxo_id=1, fee=10), Transaction(utxo_id=2, fee=5))
CONFLICTING_TXS = (Transaction(utxo_id=1, fee=10, payload=b"doublespend"), Transaction(utxo_id=2, fee=5))


@pytest.fixture(autouse=True)
def reset_package_logger() -> Iterator[None]:
    """The CLI detaches the package logger from the root; reattach it so caplog sees records"""

    def reset() -> None:
        logger = logging.getLogger("bobtaillab")
        logger.handlers.clear()
        logger.propagate = True
        logger.setLevel(logging.NOTSET)

    reset()
    yield
    reset()


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(20240917)


def loose_params(k: int) -> MiningParams:
    """256-bit hash space with a target every package meets"""
    return MiningParams.build(k, h=64, S=1 << 256, t_k=(1 << 256) - 1)


def tight_params(k: int) -> MiningParams:
    """256-bit hash space with a target no package meets"""
    return MiningParams.build(k, h=64, S=1 << 256, t_k=1)


@pytest.fixture
def reward() -> RewardParams:
    return RewardParams(R=Decimal(1), B=Decimal("0.5"))


class ProofFactory:
    """Builds real proofs with fresh nonces; values are whatever the digest gives"""

    def __init__(self, prior: int = PRIOR):
        self.prior = prior
        self.nonce = 0

    def mine(
        self,
        address: str,
        *,
        support: int = NO_SUPPORT,
        transactions: tuple[Transaction, ...] = HONEST_TXS,
        generated_at: float = 0.0,
    ) -> MinedProof:
        self.nonce += 1
        body = NonceBody(difficulty=1, timestamp=1_700_000_000, nonce=self.nonce)
        proof = ProofSet(
            prior=self.prior,
            merkle_root=transaction_root(transactions),
            address=address,
            support=support,
            nonce_commitment=body.commitment,
        )
        return MinedProof(proof=proof, nonce=body, generated_at=generated_at)

    def lowest_of(self, address: str, tries: int = 64) -> MinedProof:
        return min((self.mine(address) for _ in range(tries)), key=lambda m: m.proof.value)

    def above(self, v1: int, address: str, *, support: int, transactions: tuple[Transaction, ...] = HONEST_TXS, at: float = 0.0) -> ReceivedProof:
        """A proof by ``address`` with value above ``v1``"""
        while True:
            mined = self.mine(address, support=support, transactions=transactions)
            if mined.proof.value > v1:
                return ReceivedProof(proof=mined.proof, received_at=at)


@pytest.fixture
def factory() -> ProofFactory:
    return ProofFactory()


def build_block(
    first: MinedProof,
    others: Sequence[ProofSet] = (),
    *,
    transactions: tuple[Transaction, ...] = HONEST_TXS,
    bounties: Sequence[Bounty] = (),
    coinbase: tuple = (),
) -> Block:
    """Signed block from explicit parts, in the given order; no rule is checked"""
    proofs = (first.proof, *others)
    header = Header.from_proof(
        first.proof,
        first.nonce,
        proof_root=merkle_root([p.value for p in proofs]),
        bounty_root=merkle_root([b.bounty_hash for b in bounties]),
    )
    block = Block(
        header=header,
        transactions=transactions,
        proofs=proofs,
        bounties=tuple(bounties),
        coinbase=coinbase,
    )
    return sign_header(block)
