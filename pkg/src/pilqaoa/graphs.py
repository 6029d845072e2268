"""Weighted undirected graphs and the MaxCut-Sandbox generators.

Nodes are labelled ``0..n-1``. Edges are stored canonically as ``(u, v, w)``
with ``u < v``, sorted, without duplicates. Unweighted graphs carry ``w = 1.0``
on every edge; weighted graphs draw ``w`` i.i.d. uniform on ``(0, 1]``.
"""

import hashlib
import itertools
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, GenerationError, ParseError
from .seeding import make_rng

REGULAR_RETRY_CAP = 1000


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with positive edge weights.

    Args:
        n: Number of nodes.
        edges: Iterable of ``(u, v, w)`` triples. Normalized to ``u < v`` and
            sorted on construction.
        weighted: Whether weights are meaningful; if False every weight must
            be exactly 1.
    """

    n: int
    edges: tuple = ()
    weighted: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"node count must be a positive integer, got {self.n!r}")
        canon = []
        seen = set()
        for e in self.edges:
            u, v, w = int(e[0]), int(e[1]), float(e[2])
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if u > v:
                u, v = v, u
            if u < 0 or v >= self.n:
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            if self.weighted:
                if not 0.0 < w <= 1.0:
                    raise ValueError(f"weight {w!r} on ({u}, {v}) outside (0, 1]")
            elif w != 1.0:
                raise ValueError(f"unweighted graph has weight {w!r} on ({u}, {v})")
            seen.add((u, v))
            canon.append((u, v, w))
        canon.sort(key=lambda t: (t[0], t[1]))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "weighted", bool(self.weighted))

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def total_weight(self):
        total = 0.0
        for _, _, w in self.edges:
            total += w
        return total

    @cached_property
    def edge_arrays(self):
        """``(us, vs, ws)`` numpy arrays in canonical edge order."""
        if not self.edges:
            return (np.zeros(0, dtype=np.int64),) * 2 + (np.zeros(0),)
        us, vs, ws = zip(*self.edges)
        return np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), np.array(ws, dtype=float)

    def degrees(self):
        deg = [0] * self.n
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def has_edge(self, u, v):
        if u > v:
            u, v = v, u
        return any(a == u and b == v for a, b, _ in self.edges)

    def to_text(self):
        """Serialize to the line-oriented text format.

        Weights are written with ``repr`` which round-trips doubles exactly.
        """
        lines = [f"n {self.n} weighted {int(self.weighted)}"]
        lines.extend(f"{u} {v} {w!r}" for u, v, w in self.edges)
        return "\n".join(lines) + "\n"

    @cached_property
    def digest(self):
        """SHA-256 hex digest of the serialized graph."""
        return hashlib.sha256(self.to_text().encode()).hexdigest()


def _draw_weights(rng, count, weighted):
    if not weighted:
        return [1.0] * count
    # 1 - U[0,1) lies in (0, 1]
    return list(1.0 - rng.random(count))


def generate_random(n, ep, weighted=False, seed=0):
    """Erdos-Renyi G(n, ep): each of the n(n-1)/2 pairs kept independently."""
    if int(n) != n or n < 1:
        raise ConfigurationError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < ep < 1.0:
        raise ConfigurationError(f"edge probability must lie in (0, 1), got {ep!r}")
    rng = make_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    keep = rng.random(len(pairs)) < ep
    chosen = [pq for pq, k in zip(pairs, keep) if k]
    weights = _draw_weights(rng, len(chosen), weighted)
    return Graph(n, tuple((u, v, w) for (u, v), w in zip(chosen, weights)), weighted)


def generate_regular(n, d, weighted=False, seed=0):
    """Random d-regular graph by the pairing (configuration) model.

    Stub lists are shuffled and paired; any pairing with a loop or a repeated
    edge is rejected and redrawn, up to ``REGULAR_RETRY_CAP`` attempts.
    """
    if int(n) != n or n < 1 or int(d) != d or d < 0:
        raise ConfigurationError(f"invalid regular graph parameters n={n!r}, d={d!r}")
    if (n * d) % 2:
        raise ConfigurationError(f"n*d must be even (n={n}, d={d})")
    if d >= n:
        raise ConfigurationError(f"degree must be below n (n={n}, d={d})")
    rng = make_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(REGULAR_RETRY_CAP):
        perm = rng.permutation(stubs)
        pairs = set()
        ok = True
        for a, b in zip(perm[0::2], perm[1::2]):
            a, b = int(a), int(b)
            if a == b:
                ok = False
                break
            key = (min(a, b), max(a, b))
            if key in pairs:
                ok = False
                break
            pairs.add(key)
        if ok:
            chosen = sorted(pairs)
            weights = _draw_weights(rng, len(chosen), weighted)
            return Graph(n, tuple((u, v, w) for (u, v), w in zip(chosen, weights)), weighted)
    raise GenerationError(
        f"pairing model failed {REGULAR_RETRY_CAP} times for n={n}, d={d}"
    )


def generate_complete(n, weighted=False, seed=0):
    if int(n) != n or n < 2:
        raise ConfigurationError(f"complete graph needs n >= 2, got {n!r}")
    rng = make_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    weights = _draw_weights(rng, len(pairs), weighted)
    return Graph(n, tuple((u, v, w) for (u, v), w in zip(pairs, weights)), weighted)


def induced_subgraph(g, nodes):
    """Subgraph of ``g`` induced by ``nodes``, relabelled in the given order.

    Returns:
        ``(subgraph, mapping)`` where ``mapping[j]`` is the original label of
        new node ``j``.
    """
    nodes = [int(x) for x in nodes]
    if len(set(nodes)) != len(nodes):
        raise ValueError(f"duplicate nodes in {nodes!r}")
    if any(x < 0 or x >= g.n for x in nodes):
        raise ValueError(f"node out of range for n={g.n}: {nodes!r}")
    if not nodes:
        raise ValueError("empty node subset")
    index = {x: j for j, x in enumerate(nodes)}
    sub = [
        (index[u], index[v], w)
        for u, v, w in g.edges
        if u in index and v in index
    ]
    return Graph(len(nodes), tuple(sub), g.weighted), tuple(nodes)


def parse_graph(text):
    lines = text.splitlines()
    header = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 4 or parts[0] != "n" or parts[2] != "weighted":
                raise ParseError(f"expected header 'n <count> weighted <0|1>', got {raw!r}", lineno)
            try:
                n = int(parts[1])
                wflag = int(parts[3])
            except ValueError:
                raise ParseError(f"non-integer header field in {raw!r}", lineno) from None
            if n < 1 or wflag not in (0, 1):
                raise ParseError(f"invalid header values in {raw!r}", lineno)
            header = (n, bool(wflag))
            continue
        if len(parts) != 3:
            raise ParseError(f"expected 'u v w', got {raw!r}", lineno)
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(f"bad edge fields in {raw!r}", lineno) from None
        n, weighted = header
        if u == v:
            raise ParseError(f"self-loop on node {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"node out of range in {raw!r}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {key}", lineno)
        if weighted and not 0.0 < w <= 1.0:
            raise ParseError(f"weight {w!r} outside (0, 1]", lineno)
        if not weighted and w != 1.0:
            raise ParseError(f"unweighted graph has weight {w!r}", lineno)
        seen.add(key)
        edges.append((u, v, w))
    if header is None:
        raise ParseError("missing header", len(lines) or 1)
    return Graph(header[0], tuple(edges), header[1])


def write_graph(path, g):
    Path(path).write_text(g.to_text())


def read_graph(path):
    return parse_graph(Path(path).read_text())
