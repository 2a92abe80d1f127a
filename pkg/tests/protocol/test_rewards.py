from decimal import Decimal

import pytest

from bobtaillab.core import BountyError
from bobtaillab.protocol import (
    Bounty,
    CoinbaseOutput,
    allocate_rewards,
    coinbase_outputs,
    implicated_proofs,
    make_bounty,
    total_payout,
)
from tests.conftest import CONFLICTING_TXS, NO_SUPPORT, ProofFactory, build_block


@pytest.fixture
def package(factory: ProofFactory):
    """alice holds the 1OS; bob supports it, carol names no support, dave mined a conflicting set"""
    first = factory.lowest_of("alice")
    v1 = first.proof.value
    others = [
        factory.above(v1, "bob", support=v1).proof,
        factory.above(v1, "carol", support=NO_SUPPORT).proof,
        factory.above(v1, "dave", support=v1, transactions=CONFLICTING_TXS).proof,
    ]
    return first, tuple(sorted(others, key=lambda p: p.value))


def test_allocation_without_bounties(package, reward) -> None:
    first, others = package
    block = build_block(first, others)
    payouts = allocate_rewards(block, reward)
    assert payouts == {
        "alice": Decimal("1.5"),
        "bob": Decimal("1.5"),
        "carol": Decimal("1"),
        "dave": Decimal("1.5"),
    }
    assert sum(payouts.values()) == total_payout(block, reward) == Decimal("5.5")


def test_forfeiture_pays_the_lowest_proof_author(package, reward) -> None:
    first, others = package
    bounty = make_bounty(CONFLICTING_TXS, CONFLICTING_TXS[0])
    block = build_block(first, others, bounties=[bounty])
    dave = next(i for i, p in enumerate(block.proofs) if p.address == "dave")

    assert implicated_proofs(block) == {dave}
    payouts = allocate_rewards(block, reward)
    assert "dave" not in payouts
    assert payouts["alice"] == Decimal("1.5") + Decimal("1.5")
    assert sum(payouts.values()) == total_payout(block, reward)


def test_single_proof_block(factory: ProofFactory, reward) -> None:
    block = build_block(factory.mine("alice"))
    assert allocate_rewards(block, reward) == {"alice": Decimal("1.5")}
    assert total_payout(block, reward) == Decimal("1.5")


def test_bounty_target_must_be_in_package(factory: ProofFactory) -> None:
    first = factory.lowest_of("alice")
    honest = factory.above(first.proof.value, "bob", support=first.proof.value).proof
    block = build_block(first, [honest], bounties=[make_bounty(CONFLICTING_TXS, CONFLICTING_TXS[0])])
    with pytest.raises(BountyError, match="absent"):
        implicated_proofs(block)


def test_bounty_cannot_target_lowest_proof(factory: ProofFactory) -> None:
    first = factory.mine("alice", transactions=CONFLICTING_TXS)
    block = build_block(first, transactions=CONFLICTING_TXS, bounties=[make_bounty(CONFLICTING_TXS, CONFLICTING_TXS[0])])
    with pytest.raises(BountyError):
        implicated_proofs(block)


def test_bounty_transaction_must_conflict(package) -> None:
    first, others = package
    harmless = make_bounty(CONFLICTING_TXS, CONFLICTING_TXS[1])
    with pytest.raises(BountyError, match="conflicts with nothing"):
        implicated_proofs(build_block(first, others, bounties=[harmless]))


def test_bounty_path_must_verify(package) -> None:
    first, others = package
    bounty = make_bounty(CONFLICTING_TXS, CONFLICTING_TXS[0])
    broken = Bounty(**{**bounty.model_dump(), "leaf_index": 1})
    with pytest.raises(BountyError, match="re-hash"):
        implicated_proofs(build_block(first, others, bounties=[broken]))


def test_coinbase_outputs_skip_zero_amounts() -> None:
    outputs = coinbase_outputs({"zed": Decimal(2), "amy": Decimal(1), "nobody": Decimal(0)})
    assert outputs == (CoinbaseOutput(address="amy", amount=Decimal(1)), CoinbaseOutput(address="zed", amount=Decimal(2)))
