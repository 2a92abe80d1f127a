import json

import pytest

from bobtaillab.core import DomainError, SerializationError
from bobtaillab.protocol import RewardParams
from bobtaillab.repositories import read_results, write_results
from bobtaillab.schemas.experiments import AttackConfig, OutputFormat
from bobtaillab.schemas.results import AttackRow, BlocktimeRow, CheckRow
from bobtaillab.simulations import simulate_zczc

CONFIG = {"command": "zczc", "seed": 7, "k": [1, 5]}


def attack_rows() -> list[AttackRow]:
    return [
        AttackRow(experiment="doublespend", q=0.1 + 0.2, z=z, k=1, trials=100, seed=7, metric="success", value=1 / 3, ci_low=0.25, ci_high=0.42)
        for z in (1, 2)
    ]


@pytest.mark.parametrize("fmt", list(OutputFormat))
def test_round_trip(tmp_path, fmt: OutputFormat) -> None:
    rows = attack_rows()
    path = write_results(rows, tmp_path / f"rows.{fmt.value}", fmt=fmt, config=CONFIG)
    config, back = read_results(path)
    assert config == CONFIG
    assert [r.model_dump() for r in back] == [r.model_dump() for r in rows]
    assert back[0].q == 0.1 + 0.2


def test_csv_layout(tmp_path) -> None:
    path = write_results(attack_rows(), tmp_path / "rows.csv", config=CONFIG)
    lines = path.read_text().splitlines()
    assert lines[0] == "# config: " + json.dumps(CONFIG, sort_keys=True)
    assert lines[1] == "# kind: attack"
    assert lines[2].split(",") == AttackRow.columns()
    assert len(lines) == 5


def test_missing_values_read_back_as_none(tmp_path) -> None:
    row = BlocktimeRow(
        k=1,
        model="interval",
        trials=10,
        seed=1,
        mean=1.0,
        variance=1.0,
        ci_low=0.5,
        ci_high=1.5,
        predicted_mean=1.0,
        variance_ratio=None,
        predicted_variance_ratio=1.0,
    )
    _, back = read_results(write_results([row], tmp_path / "bt.csv"))
    assert back[0].variance_ratio is None
    assert back[0].ks_exponential is None


def test_boolean_columns(tmp_path) -> None:
    rows = [CheckRow(check="a", passed=True, observed=1.0, expected=1.0, tolerance=0.1), CheckRow(check="b", passed=False, observed=2.0, expected=1.0, tolerance=0.1)]
    _, back = read_results(write_results(rows, tmp_path / "check.csv"))
    assert [r.passed for r in back] == [True, False]


@pytest.mark.parametrize("fmt", list(OutputFormat))
def test_empty_file_keeps_its_header(tmp_path, fmt: OutputFormat) -> None:
    path = write_results([], tmp_path / f"empty.{fmt.value}", fmt=fmt, config=CONFIG, row_type=AttackRow)
    assert read_results(path) == (CONFIG, [])


def test_empty_rows_need_a_type(tmp_path) -> None:
    with pytest.raises(DomainError):
        write_results([], tmp_path / "empty.csv")


def test_rows_must_share_a_type(tmp_path) -> None:
    mixed = [*attack_rows(), CheckRow(check="a", passed=True, observed=1.0, expected=1.0, tolerance=0.1)]
    with pytest.raises(DomainError):
        write_results(mixed, tmp_path / "mixed.csv")


def test_same_seed_same_bytes(tmp_path) -> None:
    cfg = AttackConfig(q=0.2, k=3, trials=500, seed=99)
    reward = RewardParams(R=1, B=1)
    a = write_results(simulate_zczc(cfg, reward), tmp_path / "a.csv", config=cfg.to_dict())
    b = write_results(simulate_zczc(cfg, reward), tmp_path / "b.csv", config=cfg.to_dict())
    assert a.read_bytes() == b.read_bytes()


def test_creates_parent_directories(tmp_path) -> None:
    path = write_results(attack_rows(), tmp_path / "deep" / "er" / "rows.csv")
    assert path.exists()


@pytest.mark.parametrize(
    "text",
    [
        "experiment,q\n",
        '# config: {}\n# kind: nonsense\na,b\n1,2\n',
        '# config: {}\n# kind: attack\nexperiment,q,z,k,trials,seed,metric,value,ci_low,ci_high\nds,abc,1,1,10,1,success,0.1,0,1\n',
        '{"config": {}, "kind": "attack", "rows": [{"experiment": "ds"}]}',
        '{"config": {}',
        '# config: not json\n# kind: attack\nexperiment\n',
    ],
    ids=["no-header", "unknown-kind", "bad-number", "json-missing-fields", "json-truncated", "bad-config-line"],
)
def test_malformed_files(tmp_path, text: str) -> None:
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(SerializationError):
        read_results(path)
