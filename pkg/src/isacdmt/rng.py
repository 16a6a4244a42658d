"""Counter-based random streams.

Stream ``i`` of a campaign is a Philox generator keyed by ``(seed, i)``, so a
block of samples is reproducible on its own and results do not depend on
which worker draws which block.
"""

from __future__ import annotations

import os

import numpy as np

SEED_ENV = "ISACDMT_SEED"
DEFAULT_SEED = 20260101


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw else DEFAULT_SEED


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def generator(seed: int | np.random.Generator | None = None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return stream(default_seed() if seed is None else seed)
