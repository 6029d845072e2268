"""Seed derivation.

All randomness goes through numpy's ``PCG64`` bit generator
(``numpy.random.default_rng``). Child seeds are derived from a parent
seed plus a tuple of integer keys with ``numpy.random.SeedSequence``, so
streams for distinct (instance, repeat, phase, ...) keys are independent
and do not depend on scheduling order.
"""

import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def _key(k):
    if isinstance(k, str):
        return zlib.crc32(k.encode())
    return int(k) & 0xFFFFFFFF


def derive_seed(seed, *keys):
    """Return a 64-bit seed derived from ``seed`` and the given keys.

    String keys are hashed with CRC-32 so call sites can use readable tags.
    """
    ss = np.random.SeedSequence(int(seed) & MASK64, spawn_key=tuple(_key(k) for k in keys))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def make_rng(seed, *keys):
    if keys:
        seed = derive_seed(seed, *keys)
    return np.random.default_rng(int(seed) & MASK64)
