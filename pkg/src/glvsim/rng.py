"""Named, independent random substreams derived from one master seed.

Every consumer asks for a stream by name ("wind", "bits", "loss:HAL", ...),
optionally with an integer index (e.g. a receiver number). Stream identity
depends only on (master seed, name, index), so adding or removing a
consumer never shifts the numbers another consumer sees.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _name_words(name: str) -> list[int]:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def seed_sequence(master_seed: int, name: str, index: int = 0) -> np.random.SeedSequence:
    if master_seed < 0:
        raise ValueError("master seed must be non-negative")
    if not name:
        raise ValueError("stream name must be non-empty")
    return np.random.SeedSequence([int(master_seed), *_name_words(name), int(index)])


def stream(master_seed: int, name: str, index: int = 0) -> np.random.Generator:
    """A fresh generator for the named substream."""
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, name, index)))
