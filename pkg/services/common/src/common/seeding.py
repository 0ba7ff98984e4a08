"""Deterministic random-stream derivation.

Every random draw in the workspace comes from a generator built here, keyed
by a user seed, a fixed stream constant, and optional integer keys (sample
index, epoch, ...). Keyed streams make results independent of iteration
order and thread count.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigError

# Stream constants. Never renumber: changing one changes every derived dataset.
STREAM_ARRAY = 1
STREAM_GENERATE = 2
STREAM_SPLIT = 3
STREAM_COMPONENT_SHUFFLE = 4
STREAM_SUBSAMPLE = 5
STREAM_INIT = 6
STREAM_EPOCH_SHUFFLE = 7


def derive_rng(seed: int, stream: int, *keys: int) -> np.random.Generator:
    """Build an independent generator for (seed, stream, *keys)."""
    if seed < 0:
        raise ConfigError(f"Seed must be non-negative, got {seed}")
    return np.random.default_rng([seed, stream, *keys])
