from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from macfb.seeding import derive_seed, splitmix64, trial_rng


def test_reference_vectors():
    # first output of the reference SplitMix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert derive_seed(0, 0) == 0xA706DD2F4D197E6F
    assert derive_seed(2024, 7) == 0xA0512C1C270B2702


@given(st.integers(0, 2 ** 64 - 1), st.integers(0, 2 ** 20))
def test_range_and_distinct_trials(master, trial):
    s = derive_seed(master, trial)
    assert 0 <= s < 2 ** 64
    assert s != derive_seed(master, trial + 1)


def test_streams_reproducible():
    assert trial_rng(5, 3).integers(0, 2 ** 63, 4).tolist() == trial_rng(5, 3).integers(0, 2 ** 63, 4).tolist()
    assert trial_rng(5, 3).random() != trial_rng(5, 4).random()


def test_avalanche():
    # flipping one input bit flips about half of the output bits
    flips = [bin(splitmix64(x) ^ splitmix64(x ^ (1 << b))).count("1")
             for x in range(50) for b in range(64)]
    assert 30 < sum(flips) / len(flips) < 34
