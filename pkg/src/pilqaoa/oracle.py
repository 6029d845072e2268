"""Exact MaxCut values by enumeration and the random-partition baseline.

An assignment is a length-n bitstring; character ``i`` is the side of node
``i``. Internally assignments are also handled as integer basis indices with
node ``i`` on bit ``i`` (little-endian), which is the convention used by the
statevector simulator.

Every cut value in the package is accumulated the same way: a float64 sum,
starting from 0.0, over the cut edges in canonical edge order. Scalar and
vectorized paths therefore agree bit for bit and cut values from different
code paths can be compared with a plain ``>=``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ResourceError
from .seeding import make_rng

MAX_ENUM_NODES = 24


@dataclass(frozen=True)
class OracleResult:
    c_star: float
    witness: str


def as_bits(z, n):
    """Normalize an assignment (str, sequence of 0/1, or bit array) to a tuple."""
    if isinstance(z, str):
        bits = tuple(int(c) for c in z)
    else:
        bits = tuple(int(b) for b in z)
    if len(bits) != n:
        raise ValueError(f"assignment has length {len(bits)}, graph has {n} nodes")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"assignment entries must be 0 or 1: {z!r}")
    return bits


def bits_to_str(bits):
    return "".join(str(int(b)) for b in bits)


def index_to_bits(index, n):
    return tuple((int(index) >> i) & 1 for i in range(n))


def bits_to_index(bits):
    return sum(int(b) << i for i, b in enumerate(bits))


def cut_value(g, z):
    bits = as_bits(z, g.n)
    total = 0.0
    for u, v, w in g.edges:
        if bits[u] != bits[v]:
            total += w
    return total


def cut_values(g, indices):
    """Vectorized cut values for an array of basis indices."""
    indices = np.asarray(indices, dtype=np.int64)
    acc = np.zeros(indices.shape, dtype=float)
    for u, v, w in g.edges:
        differ = ((indices >> u) ^ (indices >> v)) & 1
        acc += np.where(differ == 1, w, 0.0)
    return acc


def _check_enum_size(n):
    if n > MAX_ENUM_NODES:
        raise ResourceError(f"n={n} exceeds enumeration cap {MAX_ENUM_NODES}")


def _bit_reverse(indices, n):
    rev = np.zeros_like(indices)
    for i in range(n):
        rev |= ((indices >> i) & 1) << (n - 1 - i)
    return rev


def max_cut_bruteforce(g):
    """Exact MaxCut by enumerating the 2^(n-1) assignments with node 0 on side 0.

    Ties go to the lexicographically smallest bitstring.
    """
    _check_enum_size(g.n)
    idx = np.arange(1 << (g.n - 1), dtype=np.int64) << 1
    vals = cut_values(g, idx)
    best = vals.max()
    ties = idx[vals == best]
    pick = ties[np.argmin(_bit_reverse(ties, g.n))]
    return OracleResult(float(best), bits_to_str(index_to_bits(pick, g.n)))


def random_partition_bits(n, k, seed):
    """``k`` uniform assignments as a (k, n) 0/1 array.

    Draws are row-major from one stream, so the first ``j`` rows for a given
    seed do not depend on ``k``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rng = make_rng(seed)
    return (rng.random((k, n)) < 0.5).astype(np.int64)


def random_partition_max(g, k, seed):
    """Best cut among ``k`` uniformly random partitions of ``g``."""
    bits = random_partition_bits(g.n, k, seed)
    weights = np.int64(1) << np.arange(g.n, dtype=np.int64)
    return float(cut_values(g, bits @ weights).max())
