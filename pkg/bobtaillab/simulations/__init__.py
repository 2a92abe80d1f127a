from ._runner import run_batched, run_trials
from .attacks import simulate_dor, simulate_doublespend, simulate_selfish_mining, simulate_withholding, simulate_zczc
from .events import EventKind, EventQueue, SimEvent
from .mining import (
    MinerSpec,
    first_passage_block_time,
    rank_time_correlation,
    reward_trial,
    run_blocktime_experiment,
    run_moments_experiment,
    run_reward_experiment,
)
from .network import run_orphan_experiment, run_traffic_experiment, traced_orphan_trial

__all__ = [
    "EventKind",
    "EventQueue",
    "MinerSpec",
    "SimEvent",
    "first_passage_block_time",
    "rank_time_correlation",
    "reward_trial",
    "run_batched",
    "run_blocktime_experiment",
    "run_moments_experiment",
    "run_orphan_experiment",
    "run_reward_experiment",
    "run_traffic_experiment",
    "run_trials",
    "simulate_dor",
    "simulate_doublespend",
    "simulate_selfish_mining",
    "simulate_withholding",
    "simulate_zczc",
    "traced_orphan_trial",
]
