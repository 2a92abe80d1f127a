"""Seeded random streams.

Every experiment draws from one generator family, numpy's ``PCG64``. Trial
``i`` of a run seeded with ``seed`` gets its own generator seeded with
``mix_seed(seed, i)``, the SplitMix64 finaliser applied to
``seed XOR (i * 0x9E3779B97F4A7C15) mod 2^64``. Trials are therefore
independent of execution order and of how they are split across workers.
"""

import secrets

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, trial: int) -> int:
    return splitmix64((seed ^ ((trial * GOLDEN_GAMMA) & MASK64)) & MASK64)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(mix_seed(seed, trial)))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def entropy_seed() -> int:
    """A fresh 63-bit seed for runs launched without ``--seed``"""
    return secrets.randbits(63)


def derive_seed(seed: int, label: int) -> int:
    """Independent 63-bit seed for a labelled sub-experiment (one k, one q, ...)"""
    return mix_seed(seed, label) >> 1
