"""Seeded random streams.

Every random decision is drawn from a stream derived from the master seed and
a tuple of integer keys, so the order in which streams are consumed (batching,
worker count) never changes a result.
"""

import numpy as np

# stream tags
TASKS = 1
MTMB = 2
SELECT = 3
CVT = 4
ELO = 5
PCA = 6


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, keys)]))


def derive_seed(master_seed: int, *keys: int) -> int:
    """A 63-bit integer seed for APIs that take plain ints."""
    seq = np.random.SeedSequence([int(master_seed), *map(int, keys)])
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
