"""Result rows. Field order is the column order of the CSV files."""

from typing import ClassVar

from bobtaillab.helpers.pydantic import BaseModel
from bobtaillab.stats.summary import Summary


class ResultRow(BaseModel):
    """Base class for every row type written by ``write_results``"""

    kind: ClassVar[str] = "row"

    @classmethod
    def columns(cls) -> list[str]:
        return list(cls.model_fields)


class BlocktimeRow(ResultRow):
    kind: ClassVar[str] = "blocktime"

    k: int
    model: str
    trials: int
    seed: int
    mean: float
    variance: float
    ci_low: float
    ci_high: float
    predicted_mean: float
    variance_ratio: float | None
    predicted_variance_ratio: float
    ks_exponential: float | None = None


class CdfRow(ResultRow):
    kind: ClassVar[str] = "cdf"

    k: int
    y: float
    cdf: float


class MomentsRow(ResultRow):
    kind: ClassVar[str] = "moments"

    k: int
    trials: int
    seed: int
    mean_w: float
    predicted_mean_w: float
    se_mean_w: float
    var_w: float
    predicted_var_w: float
    se_var_w: float | None = None
    cov_v1_v2: float | None = None
    predicted_cov_v1_v2: float | None = None


class TrafficRow(ResultRow):
    kind: ClassVar[str] = "traffic"

    k: int
    p: float
    trials: int
    seed: int
    x_threshold: float
    mean: float
    predicted: float
    ci_low: float
    ci_high: float
    q50: float
    q99: float
    q999: float
    tail_fraction: float
    chernoff_bound: float
    coverage: float


class OrphanRow(ResultRow):
    kind: ClassVar[str] = "orphans"

    k: int
    tau: float
    T: float
    n_miners: int
    rules: bool
    trials: int
    seed: int
    orphan_rate: float
    ci_low: float
    ci_high: float
    k1_bound: float


class RewardRow(ResultRow):
    kind: ClassVar[str] = "rewards"

    miner: str
    x: float
    k: int
    trials: int
    seed: int
    owned_fraction: float
    r_earnings: float
    b_earnings: float
    total: float
    ci_low: float
    ci_high: float
    predicted_total: float


class RankTimeRow(ResultRow):
    kind: ClassVar[str] = "rank_time"

    k: int
    trials: int
    seed: int
    sorted_by_value: bool
    correlation: float
    fraction_after_first: float
    bound: float


class AttackRow(ResultRow):
    kind: ClassVar[str] = "attack"

    experiment: str
    q: float
    z: int
    k: int
    trials: int
    seed: int
    metric: str
    value: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_summary(cls, summary: Summary, *, experiment: str, q: float, z: int, k: int, seed: int, metric: str) -> "AttackRow":
        return cls(
            experiment=experiment,
            q=q,
            z=z,
            k=k,
            trials=summary.trials,
            seed=seed,
            metric=metric,
            value=summary.mean,
            ci_low=summary.ci_low,
            ci_high=summary.ci_high,
        )


class CheckRow(ResultRow):
    kind: ClassVar[str] = "selfcheck"

    check: str
    passed: bool
    observed: float
    expected: float
    tolerance: float


ROW_TYPES: dict[str, type[ResultRow]] = {
    cls.kind: cls
    for cls in (
        BlocktimeRow,
        CdfRow,
        MomentsRow,
        TrafficRow,
        OrphanRow,
        RewardRow,
        RankTimeRow,
        AttackRow,
        CheckRow,
    )
}
