import pytest
from pydantic import ValidationError

from bobtaillab.stats import MiningParams


def test_build_derives_v_and_target() -> None:
    params = MiningParams.build(5, h=1_000, r=2.0, S=1e6)
    assert params.v == pytest.approx(2_000.0)
    assert params.t_k == pytest.approx(3 * params.v)


def test_unit_normalises_v() -> None:
    params = MiningParams.unit(10)
    assert params.v == pytest.approx(1.0)
    assert params.t_k == pytest.approx(5.5)


def test_with_k_keeps_hash_process() -> None:
    params = MiningParams.build(1, h=10_000, S=1e9).with_k(20)
    assert params.k == 20
    assert params.h == 10_000
    assert params.t_k == pytest.approx(10.5 * params.v)


def test_exact_integer_target_is_kept() -> None:
    params = MiningParams.build(3, h=64, S=1 << 256, t_k=(1 << 255) + 1)
    assert params.t_k == (1 << 255) + 1


@pytest.mark.parametrize(
    "kwargs",
    [
        {"k": 2, "S": 1e6, "h": 1_000, "r": 1.0, "v": 5.0, "t_k": 7.5},
        {"k": 2, "S": 1e6, "h": 1_000, "r": 1.0, "v": 1_000.0, "t_k": 2e6},
        {"k": 20, "S": 1e6, "h": 10, "r": 1.0, "v": 1e5, "t_k": 1e5},
        {"k": 0, "S": 1e6, "h": 1_000, "r": 1.0, "v": 1_000.0, "t_k": 10.0},
    ],
)
def test_invalid_parameters(kwargs) -> None:
    with pytest.raises(ValidationError):
        MiningParams(**kwargs)
