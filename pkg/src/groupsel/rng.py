"""Seeded random-number streams.

All randomness in the package flows through counter-based Philox generators
derived from a user seed.  Child streams are identified by integer stream ids,
so work items (replications, folds) can run in any order, or in parallel,
without changing results.
"""

from __future__ import annotations

import numpy as np

# Documented stream ids; callers compose them as spawn keys.
STREAM_DESIGN = 0
STREAM_COEFFICIENTS = 1
STREAM_NOISE = 2
STREAM_FOLDS = 3
STREAM_PRIORITY = 4
STREAM_REPLICATION = 5


def child_rng(seed: int, *stream: int) -> np.random.Generator:
    """Return the Philox generator for ``seed`` and the given stream path.

    The same (seed, stream path) always yields the same generator state;
    distinct stream paths yield statistically independent streams.
    """
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *stream: int) -> int:
    """Derive an integer seed for a child work item (e.g. one replication).

    The derivation is order-independent across work items, so running
    replications in parallel or resuming a subset reproduces the same data.
    """
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
