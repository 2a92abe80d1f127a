import random
from decimal import Decimal
from fractions import Fraction
from itertools import combinations

import pytest

from bobtaillab.core import DomainError
from bobtaillab.protocol import (
    Candidate,
    ReceivedProof,
    assemble_proof_package,
    make_bounty,
    package_limit,
    select_package,
    validate_block,
)
from bobtaillab.stats import MiningParams
from tests.conftest import (
    CONFLICTING_TXS,
    HONEST_TXS,
    PRIOR,
    ProofFactory,
    loose_params,
    tight_params,
)


def brute_force(first: Candidate, candidates: list[Candidate], k: int, limit: int) -> tuple[Candidate, ...] | None:
    best = None
    for combo in combinations(candidates, k - 1):
        if first.value + sum(c.value for c in combo) > limit:
            continue
        key = (
            -(first.reward + sum(c.reward for c in combo)),
            sum(c.received_at for c in combo),
            tuple(sorted(c.value for c in combo)),
        )
        if best is None or key < best[0]:
            best = (key, combo)
    if best is None:
        return None
    return tuple(sorted((first, *best[1]), key=lambda c: c.value))


@pytest.mark.parametrize("instance", range(40))
def test_select_package_matches_brute_force(instance: int) -> None:
    gen = random.Random(instance)
    n = gen.randint(1, 12)
    k = gen.randint(1, min(n + 1, 6))
    values = gen.sample(range(11, 200), n)
    candidates = [
        Candidate(value=v, received_at=float(gen.randint(0, 20)), reward=gen.choice((0, 1, Decimal("1.5"))), item=i)
        for i, v in enumerate(values)
    ]
    first = Candidate(value=10, received_at=0.0, reward=Decimal("1.5"))
    limit = gen.randint(10, 100 * k)
    assert select_package(first, candidates, k, limit) == brute_force(first, candidates, k, limit)


def test_select_package_single_proof() -> None:
    first = Candidate(value=5, received_at=0.0, reward=1)
    assert select_package(first, [Candidate(1, 0.0, 1)], 1, 5) == (first,)
    assert select_package(first, [], 1, 4) is None


def test_select_package_prefers_reward_then_early_receipt() -> None:
    first = Candidate(value=1, received_at=0.0, reward=1)
    cheap = Candidate(value=2, received_at=0.0, reward=0)
    paying = Candidate(value=3, received_at=9.0, reward=1)
    early = Candidate(value=4, received_at=1.0, reward=1)
    assert select_package(first, [cheap, paying, early], 2, 100) == (first, early)
    assert select_package(first, [cheap, paying, early], 2, 4) == (first, paying)


def test_select_package_rejects_bad_k() -> None:
    with pytest.raises(DomainError):
        select_package(Candidate(1, 0.0, 1), [], 0, 10)


def test_package_limit_stays_exact() -> None:
    assert package_limit(loose_params(3)) == 3 * ((1 << 256) - 1)
    params = MiningParams.unit(3)
    assert package_limit(params) == 3 * Fraction(params.t_k)


def test_holder_of_lowest_proof_assembles(factory: ProofFactory, reward) -> None:
    first = factory.lowest_of("alice")
    v1 = first.proof.value
    received = [
        factory.above(v1, "bob", support=v1, at=1.0),
        factory.above(v1, "carol", support=v1, at=2.0),
        factory.above(v1, "dave", support=v1, at=3.0),
    ]
    block = assemble_proof_package([first], received, loose_params(3), reward, transactions=HONEST_TXS)
    assert block is not None
    assert block.k == 3
    assert block.proofs[0] == first.proof
    assert list(block.values) == sorted(block.values)
    assert block.header.transaction_root == first.proof.merkle_root
    assert validate_block(block, loose_params(3), reward)


def test_only_the_lowest_proof_assembles(factory: ProofFactory, reward) -> None:
    low, high = sorted((factory.mine("alice"), factory.mine("bob")), key=lambda m: m.proof.value)
    from_low = factory.above(low.proof.value, "carol", support=low.proof.value)
    params = loose_params(2)

    received = [from_low, ReceivedProof(proof=low.proof, received_at=0.5)]
    assert assemble_proof_package([high], received, params, reward, transactions=HONEST_TXS) is None
    assert (
        assemble_proof_package([low], [from_low], params, reward, transactions=HONEST_TXS, seen_min=low.proof.value - 1)
        is None
    )
    assert assemble_proof_package([low], [from_low], params, reward, transactions=HONEST_TXS) is not None
    assert assemble_proof_package([], [from_low], params, reward, transactions=HONEST_TXS) is None


def test_no_package_under_target(factory: ProofFactory, reward) -> None:
    first = factory.lowest_of("alice")
    received = [factory.above(first.proof.value, "bob", support=first.proof.value)]
    assert assemble_proof_package([first], received, tight_params(2), reward, transactions=HONEST_TXS) is None


def test_ineligible_proofs_are_skipped(factory: ProofFactory, reward) -> None:
    first = factory.lowest_of("alice")
    v1 = first.proof.value
    unsupported = factory.above(v1, "bob", support=v1 - 1)
    other_chain = ProofFactory(prior=PRIOR + 1).above(v1, "carol", support=v1)
    params = loose_params(2)
    assert assemble_proof_package([first], [unsupported, other_chain], params, reward, transactions=HONEST_TXS) is None

    supported = factory.above(v1, "dave", support=v1)
    block = assemble_proof_package([first], [unsupported, other_chain, supported], params, reward, transactions=HONEST_TXS)
    assert block is not None
    assert block.proofs[1] == supported.proof


def test_transaction_set_must_match_lowest_proof(factory: ProofFactory, reward) -> None:
    first = factory.mine("alice", transactions=CONFLICTING_TXS)
    with pytest.raises(DomainError):
        assemble_proof_package([first], [], loose_params(1), reward, transactions=HONEST_TXS)


def test_bounty_steers_the_package(factory: ProofFactory, reward) -> None:
    first = factory.lowest_of("alice")
    v1 = first.proof.value
    honest = factory.above(v1, "bob", support=v1, at=0.0)
    conflicting = factory.above(v1, "carol", support=v1, transactions=CONFLICTING_TXS, at=5.0)
    bounty = make_bounty(CONFLICTING_TXS, CONFLICTING_TXS[0])
    params = loose_params(2)

    block = assemble_proof_package(
        [first], [honest, conflicting], params, reward, transactions=HONEST_TXS, bounties=[bounty]
    )
    assert block is not None
    assert block.proofs[1] == conflicting.proof
    assert block.bounties == (bounty,)
    assert block.payouts() == {"alice": Decimal(3)}
    assert validate_block(block, params, reward)

    without = assemble_proof_package([first], [honest, conflicting], params, reward, transactions=HONEST_TXS)
    assert without is not None
    assert without.proofs[1] == honest.proof
    assert without.bounties == ()
