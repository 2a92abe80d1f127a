import math
from functools import lru_cache

import numpy as np
import pytest
from pydantic import ValidationError

from bobtaillab.core import DomainError
from bobtaillab.protocol import RewardParams
from bobtaillab.schemas.experiments import AttackConfig
from bobtaillab.simulations import (
    shared_first_blocks,
    simulate_dor,
    simulate_doublespend,
    simulate_selfish_mining,
    simulate_withholding,
    simulate_zczc,
)
from bobtaillab.simulations.attacks.dor import canonical_labels, conflict_table
from bobtaillab.simulations.attacks.withholding import ATTACKER, HeldProof, greedy_package
from bobtaillab.simulations.attacks.zczc import ZCZC_COLUMNS

REWARD = RewardParams(R=1, B=1)


def metrics(rows) -> dict:
    return {row.metric: row for row in rows}


def race_success(q: float, z: int, margin: int) -> float:
    """Exact success of the single-proof race: a biased walk stopped at the abandonment margin"""
    p = 1.0 - q
    ratio = p / q

    def climbs_to_lead(lead: int) -> float:
        # gambler's ruin from ``lead`` up to +1 before -margin
        return (1.0 - ratio ** (lead + margin)) / (1.0 - ratio ** (margin + 1))

    @lru_cache(maxsize=None)
    def success(a: int, h: int) -> float:
        if a >= z + 1 and a > h:
            return 1.0
        if h - a >= margin:
            return 0.0
        if a >= z + 1:
            return climbs_to_lead(a - h)
        return q * success(a + 1, h) + p * success(a, h + 1)

    return success(0, 0)


def selfish_share(q: float) -> float:
    """Long-run attacker share of the lead-based policy when it wins every race"""
    p = 1.0 - q
    return (q * p * p * (4 * q + (1 - 2 * q)) - q**3) / (1 - q * (1 + (2 - q) * q))


def test_powerless_attacker_gains_nothing() -> None:
    cfg = AttackConfig(q=0.0, k=2, z=1, trials=200, seed=1)
    assert simulate_doublespend(cfg).value == 0.0
    assert simulate_selfish_mining(cfg, horizon=50).value == 0.0
    zczc = metrics(simulate_zczc(cfg, REWARD))
    assert zczc["forfeitures"].value == 0.0
    assert zczc["attacker_with_rule"].value == zczc["attacker_without_rule"].value == 0.0
    withholding = metrics(simulate_withholding(cfg.model_copy(update={"trials": 50}), REWARD))
    assert withholding["attacker_total"].value == 0.0
    assert withholding["attacker_authored"].value == 0.0


@pytest.mark.parametrize("q", [-0.1, 1.0])
def test_attacker_power_must_be_a_minority_share(q: float) -> None:
    with pytest.raises(ValidationError):
        AttackConfig(q=q, k=1)


def test_doublespend_fades_with_confirmations() -> None:
    rates = [simulate_doublespend(AttackConfig(q=0.3, k=1, z=z, trials=2_000, seed=4)).value for z in (1, 3, 6)]
    assert rates[0] > rates[1] > rates[2]


def test_doublespend_fades_with_k() -> None:
    k1 = simulate_doublespend(AttackConfig(q=0.3, k=1, z=2, trials=2_000, seed=4))
    k5 = simulate_doublespend(AttackConfig(q=0.3, k=5, z=2, trials=2_000, seed=4))
    assert k5.value < k1.value
    assert k1.metric == "success"


def test_race_success_helpers() -> None:
    assert race_success(0.4, 1, 8) == pytest.approx(0.5757, abs=1e-3)
    assert selfish_share(0.4) == pytest.approx(0.5674, abs=1e-3)
    assert selfish_share(0.49) == pytest.approx(0.9135, abs=1e-3)


@pytest.mark.slow
def test_doublespend_single_confirmation() -> None:
    row = simulate_doublespend(AttackConfig(q=0.4, k=1, z=1, trials=20_000, seed=7))
    expected = race_success(0.4, 1, 8)
    assert abs(row.value - expected) <= 4 * math.sqrt(expected * (1 - expected) / 20_000)


@pytest.mark.slow
def test_doublespend_eight_confirmations() -> None:
    k1 = simulate_doublespend(AttackConfig(q=0.4, k=1, z=8, trials=10_000, seed=7))
    expected = race_success(0.4, 8, 29)
    assert abs(k1.value - expected) <= 4 * math.sqrt(expected * (1 - expected) / 10_000)
    assert k1.value == pytest.approx(0.30, abs=0.045)
    k20 = simulate_doublespend(AttackConfig(q=0.4, k=20, z=8, trials=10_000, seed=7))
    assert k20.value < 0.01
    assert k20.ci_high < k1.ci_low


def test_doublespend_is_reproducible() -> None:
    cfg = AttackConfig(q=0.35, k=3, z=2, trials=300, seed=21)
    assert simulate_doublespend(cfg) == simulate_doublespend(cfg)
    assert 0.0 <= simulate_doublespend(cfg, reuse_first_block=True).value <= 1.0


def test_shared_first_blocks(rng: np.random.Generator) -> None:
    attacker, honest = shared_first_blocks(3, 0.3, rng)
    assert attacker > 0.0 and honest > 0.0


def test_selfish_mining_pays_with_single_proofs() -> None:
    k1 = simulate_selfish_mining(AttackConfig(q=0.4, k=1, trials=100, seed=2), horizon=500)
    k5 = simulate_selfish_mining(AttackConfig(q=0.4, k=5, trials=100, seed=2), horizon=500)
    assert k1.metric == "attacker_share"
    assert k1.value > 0.45
    assert k5.value < k1.value - 0.05


def test_selfish_share_does_not_depend_on_horizon() -> None:
    short = simulate_selfish_mining(AttackConfig(q=0.4, k=1, trials=400, seed=6), horizon=200)
    long = simulate_selfish_mining(AttackConfig(q=0.4, k=1, trials=100, seed=6), horizon=4_000)
    assert short.value == pytest.approx(long.value, abs=0.03)
    assert long.value == pytest.approx(selfish_share(0.4), abs=0.03)


@pytest.mark.slow
def test_selfish_mining_anchors() -> None:
    k1 = simulate_selfish_mining(AttackConfig(q=0.4, k=1, trials=200, seed=12), horizon=5_000)
    assert k1.value == pytest.approx(selfish_share(0.4), abs=0.015)
    k5 = simulate_selfish_mining(AttackConfig(q=0.4, k=5, trials=200, seed=12), horizon=5_000)
    assert k5.ci_high < 0.40
    near_half = simulate_selfish_mining(AttackConfig(q=0.49, k=1, trials=200, seed=12), horizon=5_000)
    assert near_half.value == pytest.approx(selfish_share(0.49), abs=0.03)
    assert near_half.value > 0.85


def test_greedy_package_prefers_pool_order() -> None:
    leader = HeldProof(1.0, ATTACKER, 0.0, 0)
    pool = [HeldProof(5.0, ATTACKER, 1.0, 3), HeldProof(2.0, 0, 1.0, 1), HeldProof(3.0, 1, 1.0, 2)]
    assert greedy_package(leader, pool, 2, 6.0) == [leader, pool[0]]
    assert greedy_package(leader, pool, 2, 5.0) == [leader, pool[1]]
    assert greedy_package(leader, pool, 3, 6.0) == [leader, pool[1], pool[2]]
    assert greedy_package(leader, pool, 3, 5.9) is None
    assert greedy_package(leader, [], 1, 1.0) == [leader]
    assert greedy_package(leader, pool, 5, 100.0) is None


def test_withholding_does_not_pay() -> None:
    rows = metrics(simulate_withholding(AttackConfig(q=0.25, k=5, trials=400, seed=3), REWARD))
    assert rows["attacker_total"].value < rows["attacker_baseline"].value
    assert rows["honest_total"].value >= 0.95 * rows["honest_baseline"].value
    assert rows["attacker_total"].value == pytest.approx(rows["attacker_r"].value + rows["attacker_b"].value)
    assert 0.0 < rows["attacker_authored"].value < 1.0


@pytest.mark.slow
def test_withholding_with_many_proofs() -> None:
    rows = metrics(simulate_withholding(AttackConfig(q=0.3, k=40, trials=2_000, seed=13), REWARD))
    assert rows["attacker_baseline"].value == pytest.approx(0.3 * 40 * 1.5)
    assert rows["attacker_total"].ci_high < rows["attacker_baseline"].value
    paid = rows["attacker_total"].value + rows["honest_total"].value
    assert rows["honest_total"].value >= 0.68 * paid


def test_all_honest_withholding_baseline() -> None:
    k = 5
    rows = metrics(simulate_withholding(AttackConfig(q=0.0, k=k, trials=300, seed=5), REWARD))
    assert rows["honest_r"].value == pytest.approx(k)
    assert 0.95 * rows["honest_baseline"].value <= rows["honest_total"].value <= k * 2


def test_withholding_rejects_bad_release() -> None:
    with pytest.raises(DomainError):
        simulate_withholding(AttackConfig(q=0.2, k=2, trials=5), REWARD, release_factor=0.9)
    with pytest.raises(DomainError):
        simulate_withholding(AttackConfig(q=0.2, k=2, trials=5), REWARD, n_honest=0)


def test_forfeiture_makes_conflicting_proofs_unprofitable() -> None:
    rows = metrics(simulate_zczc(AttackConfig(q=0.2, k=5, trials=20_000, seed=8), REWARD))
    assert [row.metric for row in rows.values()] == list(ZCZC_COLUMNS)
    assert rows["attacker_with_rule"].value < rows["attacker_honest"].value
    assert rows["attacker_without_rule"].value == pytest.approx(rows["attacker_honest"].value)
    assert rows["attacker_with_rule"].value + rows["honest_with_rule"].value == pytest.approx(rows["payout"].value)
    assert rows["forfeitures"].value > 0.0


def test_conflict_table() -> None:
    table = conflict_table()
    assert table[1, 2] and table[2, 1]
    assert not table[1, 1] and not table[2, 2]
    assert not table[0].any() and not table[:, 0].any()


def test_canonical_labels() -> None:
    assert canonical_labels(2.0, 5.0)[0] == canonical_labels(2.0, 5.0)[1]
    assert canonical_labels(10.0, 5.0) == (1, 2)


def test_unsplit_network_forfeits_nothing() -> None:
    for split in (0.0, 1.0):
        rows = metrics(simulate_dor(split, 2.0, 5.0, 4, 2_000, seed=1))
        assert rows["forfeited_naive"].value == 0.0
        assert rows["forfeited_convention"].value == 0.0
        assert rows["predicted_naive"].value == 0.0


def test_even_split_forfeits_half_without_grace_period() -> None:
    rows = metrics(simulate_dor(0.5, 2.0, 5.0, 10, 20_000, seed=2))
    assert rows["forfeited_naive"].value == pytest.approx(0.5, abs=0.01)
    assert rows["predicted_naive"].value == pytest.approx(0.5)
    assert rows["forfeited_convention"].value < 0.01
    assert rows["forfeited_naive"].q == 0.5


def test_late_seeding_shrinks_losses() -> None:
    rows = metrics(simulate_dor(0.5, 2.0, 5.0, 10, 20_000, seed=2, release=0.5))
    assert rows["forfeited_naive"].value == pytest.approx(rows["predicted_naive"].value, abs=0.02)
    assert rows["forfeited_naive"].value < 0.2


def test_dor_needs_a_package() -> None:
    with pytest.raises(DomainError):
        simulate_dor(0.5, 2.0, 5.0, 1, 10, seed=1)
