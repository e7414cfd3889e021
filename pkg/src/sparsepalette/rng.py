"""Deterministic counter-based RNG substreams.

Every randomized operation draws from a Philox generator keyed by
(seed, vertex id, phase tag), so distinct vertices and distinct phases of a
multi-step pipeline consume independent randomness.  Fixing one vertex's
stream never perturbs another's.
"""

from __future__ import annotations

import numpy as np

_MASK32 = (1 << 32) - 1
_MASK64 = (1 << 64) - 1

# Phase tags.  Values only need to be distinct; nibble rounds offset from the
# round bases by the iteration index.
GNP = 1
SAMPLE = 2
POTENTIAL = 3
MT_INIT = 4
MT_RESAMPLE = 5
ACTIVATE = 6
BATCH_SPLIT = 7
PARTITION = 8
DEMO = 9
RETRY = 10
RESOLVE = 11
NIBBLE_ASSIGN_BASE = 1000
NIBBLE_EQUALIZE_BASE = 2000


def substream(seed: int, vertex: int = 0, phase: int = 0) -> np.random.Generator:
    """Generator for the (seed, vertex, phase) substream."""
    key = np.array(
        [
            np.uint64(seed & _MASK64),
            np.uint64(((phase & _MASK32) << 32) | (vertex & _MASK32)),
        ],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, salt: int) -> int:
    """Stable derived seed for retries and per-part sub-runs."""
    return int(substream(seed, salt, RETRY).integers(0, 2**63 - 1))
