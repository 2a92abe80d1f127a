import pytest

from bobtaillab.protocol import (
    Block,
    Header,
    RejectReason,
    assemble_proof_package,
    make_bounty,
    validate_block,
    verify_signature,
)
from tests.conftest import (
    CONFLICTING_TXS,
    HONEST_TXS,
    PRIOR,
    ProofFactory,
    build_block,
    loose_params,
    tight_params,
)


@pytest.fixture
def assembled(factory: ProofFactory, reward):
    first = factory.lowest_of("alice")
    v1 = first.proof.value
    received = [factory.above(v1, "bob", support=v1, at=1.0), factory.above(v1, "carol", support=v1, at=2.0)]
    block = assemble_proof_package([first], received, loose_params(3), reward, transactions=HONEST_TXS)
    assert block is not None
    return first, block


def replace(block: Block, **changes) -> Block:
    fields = {name: getattr(block, name) for name in Block.model_fields}
    return Block(**{**fields, **changes})


def test_assembled_block_is_accepted(assembled, reward) -> None:
    _, block = assembled
    verdict = validate_block(block, loose_params(3), reward)
    assert verdict
    assert verdict.reason is None
    assert verify_signature(block)
    assert validate_block(block, loose_params(3), reward, seen_min=block.values[0])


def test_wrong_package_size(assembled, reward) -> None:
    _, block = assembled
    assert validate_block(block, loose_params(2), reward).reason is RejectReason.STRUCTURE


def test_missing_transactions(assembled, reward) -> None:
    _, block = assembled
    assert validate_block(replace(block, transactions=()), loose_params(3), reward).reason is RejectReason.STRUCTURE


def test_unsorted_proofs(assembled, reward) -> None:
    _, block = assembled
    swapped = replace(block, proofs=(block.proofs[0], block.proofs[2], block.proofs[1]))
    assert validate_block(swapped, loose_params(3), reward).reason is RejectReason.ORDER


def test_foreign_prior(assembled, reward) -> None:
    first, block = assembled
    stranger = ProofFactory(prior=PRIOR + 1).above(block.values[1], "dave", support=block.values[0]).proof
    mixed = build_block(first, (block.proofs[1], stranger))
    assert validate_block(mixed, loose_params(3), reward).reason is RejectReason.PRIOR


def test_header_must_copy_lowest_proof(assembled, reward) -> None:
    _, block = assembled
    header = Header(**{**block.header.model_dump(), "support": 5})
    assert validate_block(replace(block, header=header), loose_params(3), reward).reason is RejectReason.HEADER


def test_header_must_commit_to_package(assembled, reward) -> None:
    _, block = assembled
    header = Header(**{**block.header.model_dump(), "proof_root": block.header.proof_root ^ 1})
    assert validate_block(replace(block, header=header), loose_params(3), reward).reason is RejectReason.HEADER


def test_target_exceeded(assembled, reward) -> None:
    _, block = assembled
    assert validate_block(block, tight_params(3), reward).reason is RejectReason.TARGET


def test_support_below_lowest_value(factory: ProofFactory, reward) -> None:
    first = factory.lowest_of("alice")
    v1 = first.proof.value
    supported = factory.above(v1, "bob", support=v1).proof
    unsupported = factory.above(v1, "carol", support=v1 - 1).proof
    others = tuple(sorted((supported, unsupported), key=lambda p: p.value))
    assert validate_block(build_block(first, others), loose_params(3), reward).reason is RejectReason.SUPPORT


def test_forged_signature(assembled, reward) -> None:
    _, block = assembled
    forged = replace(block, signature=b"\x00" * len(block.signature))
    assert validate_block(forged, loose_params(3), reward).reason is RejectReason.SIGNATURE


def test_lower_proof_already_seen(assembled, reward) -> None:
    _, block = assembled
    verdict = validate_block(block, loose_params(3), reward, seen_min=block.values[0] - 1)
    assert verdict.reason is RejectReason.NOT_LOWEST


def test_bounty_without_target(assembled, reward) -> None:
    first, block = assembled
    bounty = make_bounty(CONFLICTING_TXS, CONFLICTING_TXS[0])
    tampered = build_block(first, block.proofs[1:], bounties=[bounty], coinbase=block.coinbase)
    assert validate_block(tampered, loose_params(3), reward).reason is RejectReason.BOUNTY


def test_coinbase_must_match_allocation(assembled, reward) -> None:
    first, block = assembled
    assert validate_block(replace(block, coinbase=()), loose_params(3), reward).reason is RejectReason.COINBASE
    greedy = build_block(first, block.proofs[1:], coinbase=block.coinbase[:1])
    assert validate_block(greedy, loose_params(3), reward).reason is RejectReason.COINBASE
