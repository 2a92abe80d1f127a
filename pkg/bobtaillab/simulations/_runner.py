"""Deterministic trial fan-out.

``run_trials`` hands trial ``i`` its own generator seeded from ``(seed, i)``;
``run_batched`` hands batch ``b`` of a fixed size a generator seeded from
``(seed, b)`` for vectorised samplers. Either way the results depend only on
the seed and the trial count, never on the number of workers.
"""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

import numpy as np

from bobtaillab.core import feature_flags, require, settings
from bobtaillab.helpers.rng import trial_rng

logger = logging.getLogger(__name__)

T = TypeVar("T")

BATCH_SIZE = 8192
BATCH_STREAM = 0x5EED_BA7C_0000_0000


def warn_if_few_trials(trials: int, experiment: str) -> None:
    if feature_flags.warn_small_trials and trials < settings.min_reliable_trials:
        logger.warning(
            f"{experiment}: {trials} trials is below {settings.min_reliable_trials}; confidence intervals are unreliable",
            extra={"data": {"trials": trials, "experiment": experiment}},
        )


def _run_chunk(trial_fn: Callable[[np.random.Generator, int], T], seed: int, indices: Sequence[int]) -> list[T]:
    return [trial_fn(trial_rng(seed, i), i) for i in indices]


def _chunks(n: int, parts: int) -> list[range]:
    size = max(1, -(-n // parts))
    return [range(start, min(start + size, n)) for start in range(0, n, size)]


def run_trials(
    trial_fn: Callable[[np.random.Generator, int], T],
    trials: int,
    seed: int,
    *,
    jobs: int = 1,
) -> list[T]:
    """Run ``trial_fn(rng, index)`` for every trial index, results in index order.

    With ``jobs > 1`` the indices are split into contiguous chunks and run in a
    process pool; ``trial_fn`` must then be picklable (a module-level function
    or a ``functools.partial`` of one).
    """
    require(trials >= 1, f"trials must be positive, got {trials}")
    require(jobs >= 1, f"jobs must be positive, got {jobs}")
    if jobs == 1 or trials < 2:
        return _run_chunk(trial_fn, seed, range(trials))

    chunks = _chunks(trials, jobs * 4)
    logger.debug(f"Running {trials} trials in {len(chunks)} chunks on {jobs} workers")
    results: list[T] = []
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        futures = [executor.submit(_run_chunk, trial_fn, seed, chunk) for chunk in chunks]
        for future in futures:
            results.extend(future.result())
    return results


def _run_batch(batch_fn: Callable[[np.random.Generator, int], np.ndarray], seed: int, batch: int, count: int) -> np.ndarray:
    return np.asarray(batch_fn(trial_rng(seed ^ BATCH_STREAM, batch), count))


def run_batched(
    batch_fn: Callable[[np.random.Generator, int], np.ndarray],
    trials: int,
    seed: int,
    *,
    jobs: int = 1,
    batch_size: int = BATCH_SIZE,
) -> np.ndarray:
    """Concatenate ``batch_fn(rng, count)`` over fixed-size batches along the first axis"""
    require(trials >= 1, f"trials must be positive, got {trials}")
    require(jobs >= 1, f"jobs must be positive, got {jobs}")
    counts = [min(batch_size, trials - start) for start in range(0, trials, batch_size)]
    if jobs == 1 or len(counts) == 1:
        parts = [_run_batch(batch_fn, seed, b, count) for b, count in enumerate(counts)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(_run_batch, batch_fn, seed, b, count) for b, count in enumerate(counts)]
            parts = [future.result() for future in futures]
    return np.concatenate(parts, axis=0)
