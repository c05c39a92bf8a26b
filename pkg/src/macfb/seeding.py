"""Deterministic per-trial seeds.

``derive_seed(master, trial) = splitmix64(master ^ splitmix64(trial))`` on 64-bit
unsigned integers, where ``splitmix64(x)`` is the finaliser of the SplitMix64
generator applied to ``x + 0x9E3779B97F4A7C15``. Test vectors::

    splitmix64(0)          == 0xE220A8397B1DCDAF
    derive_seed(0, 0)      == 0xA706DD2F4D197E6F
    derive_seed(2024, 7)   == 0xA0512C1C270B2702

Each trial then uses ``numpy.random.Generator(PCG64(derive_seed(master, trial)))``.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, trial_index: int) -> int:
    return splitmix64((master_seed & MASK64) ^ splitmix64(trial_index & MASK64))


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, trial_index)))
