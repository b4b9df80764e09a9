"""
Seeded random streams.

Streams are counter-based Philox generators derived from a root seed and a
tuple of keys, e.g. derive_rng(seed, "batch", 3, "tree", 7). The same
(seed, keys) always yields the same stream, independent of the order in which
other streams were created, so batch and tree work can run in any order.
"""

import zlib
from typing import List, Union

import numpy as np

Key = Union[int, str]


def _key_words(keys: tuple) -> List[int]:
    words = []
    for key in keys:
        if isinstance(key, str):
            words.append(zlib.crc32(key.encode("utf-8")))
        else:
            key = int(key)
            if key < 0:
                raise ValueError(f"stream keys must be non-negative, got {key}")
            words.append(key)
    return words


def derive_rng(seed: int, *keys: Key) -> np.random.Generator:
    """
    Derive an independent random stream.

    Args:
        seed: Root seed (non-negative integer)
        *keys: Integer or string keys identifying the stream

    Returns:
        np.random.Generator backed by Philox
    """
    entropy = [int(seed)] + _key_words(keys)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
