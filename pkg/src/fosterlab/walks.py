"""Walk enumeration and closed-walk counts on unit-conductance graphs."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy import sparse

from .graph import Graph, GraphError

Walk = tuple[int, ...]


def _require_unit(g: Graph) -> None:
    if not g.is_unit():
        raise GraphError("walk counts are defined for unit conductances only")


def adjacency_matrix(g: Graph) -> sparse.csr_matrix:
    """0/1 adjacency as an int64 CSR matrix."""
    if g.m == 0:
        return sparse.csr_matrix((g.n, g.n), dtype=np.int64)
    e = np.asarray(g.edges, dtype=np.int64)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    data = np.ones(len(rows), dtype=np.int64)
    return sparse.csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


def _count_matrix(g: Graph, v: int, s: int) -> int:
    A = adjacency_matrix(g)
    vec = np.zeros(g.n, dtype=np.int64)
    vec[v] = 1
    for _ in range(s):
        vec = A @ vec
    return int(vec[v])


def _count_dfs(g: Graph, v: int, s: int) -> int:
    adj = g.adjacency

    def go(u: int, left: int) -> int:
        if left == 0:
            return int(u == v)
        return sum(go(w, left - 1) for w, _ in adj[u])

    return go(v, s)


def closed_walk_count(g: Graph, v: int, s: int, method: str = "matrix") -> int:
    """Number of length-``s`` walks from ``v`` back to ``v``.

    ``method="matrix"`` reads the diagonal of ``A^s`` (via repeated
    matrix-vector products), ``"dfs"`` enumerates walks, and ``"both"``
    runs the two and insists they agree.
    """
    _require_unit(g)
    g._check_vertex(v)
    if s < 0:
        raise ValueError("walk length must be >= 0")
    if method == "matrix":
        return _count_matrix(g, v, s)
    if method == "dfs":
        return _count_dfs(g, v, s)
    if method == "both":
        a, b = _count_matrix(g, v, s), _count_dfs(g, v, s)
        if a != b:
            raise AssertionError(f"walk counts disagree: matrix {a}, dfs {b}")
        return a
    raise ValueError(f"unknown method {method!r}")


@dataclass
class WalkCountTable:
    """Closed-walk counts ``deltas[s]`` for ``s = 0..r`` at one vertex."""

    k: int
    deltas: list[int]

    def __getitem__(self, s: int) -> int:
        return self.deltas[s]

    def __len__(self) -> int:
        return len(self.deltas)


def walk_count_table(g: Graph, v: int, r: int, method: str = "matrix") -> WalkCountTable:
    _require_unit(g)
    A = adjacency_matrix(g)
    vec = np.zeros(g.n, dtype=np.int64)
    vec[v] = 1
    deltas = [1]
    if method == "dfs":
        deltas = [_count_dfs(g, v, s) for s in range(r + 1)]
    else:
        for _ in range(r):
            vec = A @ vec
            deltas.append(int(vec[v]))
    return WalkCountTable(len(g.adjacency[v]), deltas)


def enumerate_walks(g: Graph, v: int, r: int) -> Iterator[Walk]:
    """Yield every walk ``(v, v1, ..., vr)`` once, lexicographically by vertex id."""
    g._check_vertex(v)
    if r < 1:
        raise ValueError("walk length must be >= 1")
    adj = [[w for w, _ in a] for a in g.adjacency]
    path = [v]

    def go(u: int) -> Iterator[Walk]:
        if len(path) == r + 1:
            yield tuple(path)
            return
        for w in adj[u]:
            path.append(w)
            yield from go(w)
            path.pop()

    yield from go(v)


def is_degenerate(walk: Walk) -> bool:
    """Walks that fold back onto a shorter walk.

    Length 3, ``v x y w``: ``y == v`` or ``w == x``.
    Length 4, ``v x y z w``: ``y in (v, w)`` or ``z == x``.
    """
    r = len(walk) - 1
    if r == 3:
        v, x, y, w = walk
        return y == v or w == x
    if r == 4:
        v, x, y, z, w = walk
        return y == v or y == w or z == x
    raise ValueError("degeneracy filter is defined for walk lengths 3 and 4 only")


@dataclass
class WalkCensus:
    r: int
    total: int = 0
    degenerate: int = 0
    endpoints: Counter = field(default_factory=Counter)
    degenerate_endpoints: Counter = field(default_factory=Counter)

    @property
    def nondegenerate(self) -> int:
        return self.total - self.degenerate

    def nondegenerate_endpoints(self) -> Counter:
        out = Counter(self.endpoints)
        out.subtract(self.degenerate_endpoints)
        return +out

    def summary(self) -> dict:
        return {
            "r": self.r,
            "total": self.total,
            "degenerate": self.degenerate,
            "nondegenerate": self.nondegenerate,
            "distinct_endpoints": len(self.endpoints),
        }


def degenerate_census(g: Graph, v: int, r: int) -> WalkCensus:
    if r not in (3, 4):
        raise ValueError("degenerate census is defined for r = 3 and r = 4 only")
    census = WalkCensus(r)
    for walk in enumerate_walks(g, v, r):
        end = walk[-1]
        census.total += 1
        census.endpoints[end] += 1
        if is_degenerate(walk):
            census.degenerate += 1
            census.degenerate_endpoints[end] += 1
    return census


def endpoint_multiplicities(g: Graph, v: int, r: int, nondegenerate: bool = False) -> Counter:
    """How many length-``r`` walks from ``v`` end at each vertex."""
    out: Counter = Counter()
    for walk in enumerate_walks(g, v, r):
        if nondegenerate and is_degenerate(walk):
            continue
        out[walk[-1]] += 1
    return out
