"""Experiment and attack configuration models."""

from enum import Enum
from pathlib import Path

from pydantic import Field, field_validator

from bobtaillab.core import settings
from bobtaillab.helpers.pydantic import BaseModel, FrozenModel


class Command(str, Enum):
    BLOCKTIME = "blocktime"
    MOMENTS = "moments"
    TRAFFIC = "traffic"
    ORPHANS = "orphans"
    REWARDS = "rewards"
    DOUBLESPEND = "doublespend"
    SELFISH = "selfish"
    WITHHOLDING = "withholding"
    ZCZC = "zczc"
    DOR = "dor"
    SELFCHECK = "selfcheck"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class BlocktimeModel(str, Enum):
    INTERVAL = "interval"
    EXACT = "exact"


class AttackConfig(FrozenModel):
    """Parameters shared by the attack simulations; honest power is ``1 - q``"""

    q: float = Field(ge=0.0, lt=1.0)
    k: int = Field(ge=1)
    z: int = Field(default=0, ge=0)
    trials: int = Field(default=10_000, ge=1)
    seed: int = Field(default=0, ge=0)
    stop_margin: int | None = Field(default=None, ge=1)

    @property
    def honest_power(self) -> float:
        return 1.0 - self.q

    @property
    def resolved_stop_margin(self) -> int:
        """Honest lead at which a doublespend attempt is abandoned, 3z + 5 unless set"""
        return self.stop_margin if self.stop_margin is not None else 3 * self.z + 5


class ExperimentConfig(BaseModel):
    """Fully resolved configuration of one CLI run, echoed into result headers.

    Plain model: k, trials, jobs and p default to the current ``settings``; it
    reads no environment variables itself.
    """

    command: Command
    k: list[int] = Field(default_factory=lambda: list(settings.k_grid))
    trials: int = Field(default_factory=lambda: settings.default_trials, ge=1)
    seed: int = Field(ge=0)
    jobs: int = Field(default_factory=lambda: settings.jobs, ge=1)

    tau: float = Field(default=10.0, ge=0.0)
    T: float = Field(default=600.0, gt=0.0)
    n_miners: int = Field(default=20, ge=1)
    rules: bool = True

    p: float = Field(default_factory=lambda: settings.broadcast_probability, gt=0.0, lt=1.0)
    h: int = Field(default=1_000_000, ge=1)

    q: list[float] = Field(default_factory=lambda: [0.4])
    z: list[int] = Field(default_factory=lambda: [1])
    horizon: int = Field(default=2_000, ge=1)
    reuse_first_block: bool = False

    R: float = Field(default=1.0, ge=0.0)
    B: float = Field(default=1.0, ge=0.0)
    x: list[float] = Field(default_factory=lambda: [0.25, 0.25, 0.5])
    rank_time: bool = False
    n_honest: int = Field(default=10, ge=1)
    release_factor: float = Field(default=1.05, ge=1.0)

    split: list[float] = Field(default_factory=lambda: [0.5])
    latency: float = Field(default=2.0, ge=0.0)
    grace: float = Field(default=5.0, ge=0.0)
    release: float = Field(default=0.0, ge=0.0, lt=1.0)

    model: BlocktimeModel = BlocktimeModel.INTERVAL
    output: Path | None = None
    format: OutputFormat = OutputFormat.CSV
    trace: Path | None = None

    @field_validator("k")
    @classmethod
    def validate_k(cls, v: list[int]) -> list[int]:
        if not v or any(k < 1 for k in v):
            raise ValueError("k must be a non-empty list of positive integers")
        return v

    @field_validator("q")
    @classmethod
    def validate_q(cls, v: list[float]) -> list[float]:
        if not v or any(not 0.0 <= q < 1.0 for q in v):
            raise ValueError("attacker power q must lie in [0, 1)")
        return v

    @field_validator("z")
    @classmethod
    def validate_z(cls, v: list[int]) -> list[int]:
        if not v or any(z < 0 for z in v):
            raise ValueError("embargo z must be a non-negative integer")
        return v

    @field_validator("x")
    @classmethod
    def validate_x(cls, v: list[float]) -> list[float]:
        if not v or any(not 0.0 < x <= 1.0 for x in v):
            raise ValueError("hash fractions must lie in (0, 1]")
        if abs(sum(v) - 1.0) > 1e-9:
            raise ValueError(f"hash fractions must sum to 1, got {sum(v)}")
        return v

    @field_validator("split")
    @classmethod
    def validate_split(cls, v: list[float]) -> list[float]:
        if not v or any(not 0.0 <= s <= 1.0 for s in v):
            raise ValueError("split must lie in [0, 1]")
        return v

    def default_name(self) -> str:
        return f"{self.command.value}-seed{self.seed}.{self.format.value}"
