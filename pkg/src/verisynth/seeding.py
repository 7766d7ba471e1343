"""Deterministic, order-independent random stream derivation.

Every random draw in an experiment comes from a stream keyed by
(master_seed, replication, round, direction), so results are byte-identical
no matter how replications are scheduled across workers.

Keying convention
-----------------
- replication 0 is reserved for experiment-level draws shared by all
  replications: (0, 0, 0) seeds the real design matrix, (0, 0, 1) the bias
  direction used to place a verifier center at distance delta from truth.
- replications are 1-based; (rep, 0, 0) seeds replication ``rep``'s real data.
- retraining round k >= 1, direction j >= 1 draws from (rep, k, j); the 1-D
  process uses direction 1.
"""
from __future__ import annotations

import numpy as np

from .errors import SeedSpaceError

#: inclusive upper bound on each stream index (and on the master seed)
MAX_INDEX = 2 ** 63 - 1

#: reserved experiment-level keys (replication 0)
DESIGN_KEY = (0, 0, 0)
BIAS_DIRECTION_KEY = (0, 0, 1)


def _check_index(name: str, value: int, minimum: int = 0) -> int:
    value = int(value)
    if not minimum <= value <= MAX_INDEX:
        raise SeedSpaceError(
            f"{name} must lie in [{minimum}, {MAX_INDEX}], got {value}"
        )
    return value


def derive_stream(
    master_seed: int, replication: int, round_index: int, direction: int
) -> np.random.Generator:
    """Independent counter-based RNG stream for one (replication, round, direction).

    Pure function of its arguments: the same key always yields a generator with
    the same output, and distinct keys yield statistically independent streams.
    """
    master_seed = _check_index("master_seed", master_seed)
    key = (
        _check_index("replication", replication),
        _check_index("round_index", round_index),
        _check_index("direction", direction),
    )
    seq = np.random.SeedSequence(master_seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))
