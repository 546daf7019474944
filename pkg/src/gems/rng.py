"""Deterministic random-stream derivation.

Every consumer gets its own generator derived from (seed, iteration, purpose),
so adding seeds, reordering consumers, or changing worker counts never
perturbs an existing stream.
"""

from __future__ import annotations

import numpy as np

# Purpose tags for per-iteration streams. Values are stable identifiers baked
# into the seed material; never renumber.
INIT = 0
ESTIMATE = 1
GAME_VALUE = 2
POOL = 3
ORACLE = 4
ABR = 5
BASELINE = 6


def stream(seed: int, iteration: int, purpose: int, extra: int = 0) -> np.random.Generator:
    """Generator for a (seed, iteration, purpose[, extra]) slot."""
    ss = np.random.SeedSequence(entropy=(int(seed), int(iteration), int(purpose), int(extra)))
    return np.random.default_rng(ss)
