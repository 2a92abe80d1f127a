"""Difficulty retargeting.

Difficulty ``d`` scales the classic single-proof target ``(2^bits - 1) / d``;
a package of ``k`` proofs is held to ``t_k = t_1 (k+1) / 2`` so that the
expected block time does not depend on ``k``.
"""

import logging
from fractions import Fraction

from bobtaillab.core import require, settings

logger = logging.getLogger(__name__)

MAX_ADJUSTMENT = 4


def retarget(prev_difficulty: int, observed_mean: float, desired: float) -> int:
    """d' = d * desired / observed, clamped to [d/4, 4d] and at least 1"""
    require(prev_difficulty >= 1, f"difficulty must be positive, got {prev_difficulty!r}")
    require(desired > 0.0, f"desired block time must be positive, got {desired!r}")
    require(observed_mean >= 0.0, f"observed block time must be non-negative, got {observed_mean!r}")
    prev = Fraction(prev_difficulty)
    upper = prev * MAX_ADJUSTMENT
    lower = prev / MAX_ADJUSTMENT
    if observed_mean == 0.0:
        proposed = upper
    else:
        proposed = min(max(prev * Fraction(desired) / Fraction(observed_mean), lower), upper)
    new_difficulty = max(1, round(proposed))
    if proposed in (lower, upper):
        logger.info(f"Retarget clamped: {prev_difficulty} -> {new_difficulty}")
    return new_difficulty


def target_from_difficulty(difficulty: int, k: int, bits: int | None = None) -> int:
    """t_k = floor((2^bits - 1) / d) * (k+1) / 2, rounded down"""
    require(difficulty >= 1, f"difficulty must be positive, got {difficulty!r}")
    require(k >= 1, f"k must be positive, got {k!r}")
    if bits is None:
        bits = settings.hash_bits
    t_1 = ((1 << bits) - 1) // difficulty
    return t_1 * (k + 1) // 2
