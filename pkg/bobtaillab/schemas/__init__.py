from .experiments import AttackConfig, BlocktimeModel, Command, ExperimentConfig, OutputFormat
from .results import (
    ROW_TYPES,
    AttackRow,
    BlocktimeRow,
    CdfRow,
    CheckRow,
    MomentsRow,
    OrphanRow,
    RankTimeRow,
    ResultRow,
    RewardRow,
    TrafficRow,
)

__all__ = [
    "AttackConfig",
    "AttackRow",
    "BlocktimeModel",
    "BlocktimeRow",
    "CdfRow",
    "CheckRow",
    "Command",
    "ExperimentConfig",
    "MomentsRow",
    "OrphanRow",
    "OutputFormat",
    "ROW_TYPES",
    "RankTimeRow",
    "ResultRow",
    "RewardRow",
    "TrafficRow",
]
