"""Keyed, counter-based random streams.

Every random draw in a simulation is taken from a Philox stream whose key is
derived from ``(seed, snr_index, frame_index, purpose, lane)``. A frame can be
regenerated in isolation, on any worker, in any order, which is what makes
results independent of how frames are spread across processes.
"""

from __future__ import annotations

import numpy as np

# Stream purposes. Values are part of the key, never renumber them.
INFO = 0
CHANNEL = 1
NOISE = 2
BSC = 3


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for ``seed`` and an integer key path."""
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def frame_stream(seed: int, snr_index: int, frame_index: int, purpose: int, lane: int = 0) -> np.random.Generator:
    return stream(seed, snr_index, frame_index, purpose, lane)
