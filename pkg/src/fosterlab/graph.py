"""Undirected simple graphs with per-edge conductances, plus edge-list I/O."""
from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, TextIO, Union

import numpy as np
from scipy import sparse

Scalar = Union[Fraction, float]

ORIGINAL = "original"
SUBDIVIDING = "subdividing"


class GraphError(ValueError):
    """Raised for structurally invalid graphs (loops, parallel edges, bad ids)."""


class EdgeListFormatError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _coerce(c, exact: bool) -> Scalar:
    if isinstance(c, bool):
        raise GraphError(f"invalid conductance {c!r}")
    if exact:
        if isinstance(c, float):
            raise GraphError("float conductance given to an exact graph")
        if isinstance(c, (int, Fraction)):
            return Fraction(c)
        raise GraphError(f"invalid conductance {c!r}")
    if isinstance(c, Fraction):
        raise GraphError("rational conductance given to a float graph")
    if isinstance(c, (int, float, np.floating, np.integer)):
        return float(c)
    raise GraphError(f"invalid conductance {c!r}")


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph on vertices ``0..n-1``.

    ``edges[e] = (u, v)`` with ``u < v``; ``conductances[e]`` is the edge's
    conductance. ``exact`` fixes the scalar kind: all conductances are
    :class:`~fractions.Fraction` when true, all ``float`` otherwise.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    conductances: tuple[Scalar, ...]
    exact: bool = True
    labels: tuple[str | None, ...] | None = None
    adjacency: tuple[tuple[tuple[int, int], ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("graph needs at least one vertex")
        if len(self.conductances) != len(self.edges):
            raise GraphError("one conductance per edge required")
        if self.labels is not None and len(self.labels) != self.n:
            raise GraphError("one label per vertex required")
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        seen = set()
        for eid, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {eid} ({u}, {v}) has an invalid vertex id")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if u > v:
                raise GraphError(f"edge {eid} not stored as (min, max)")
            if (u, v) in seen:
                raise GraphError(f"parallel edge between {u} and {v}")
            seen.add((u, v))
            c = self.conductances[eid]
            if self.exact != isinstance(c, Fraction):
                raise GraphError("mixed scalar kinds in conductances")
            if not c > 0:
                raise GraphError(f"non-positive conductance on edge ({u}, {v})")
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Sequence[int]],
        conductances: Iterable | None = None,
        *,
        exact: bool = True,
        labels: Sequence[str | None] | None = None,
    ) -> "Graph":
        """Build a graph from ``(u, v)`` pairs in any orientation."""
        edges = [(int(a), int(b)) for a, b in edges]
        if conductances is None:
            cs = [Fraction(1) if exact else 1.0] * len(edges)
        else:
            cs = [_coerce(c, exact) for c in conductances]
        norm = [(a, b) if a < b else (b, a) for a, b in edges]
        return cls(n, tuple(norm), tuple(cs), exact, None if labels is None else tuple(labels))

    # -- basic queries -------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise GraphError(f"invalid vertex id {v} (n={self.n})")

    def neighbors(self, v: int) -> list[int]:
        self._check_vertex(v)
        return [u for u, _ in self.adjacency[v]]

    def conductance(self, u: int, v: int) -> Scalar:
        self._check_vertex(u)
        for w, eid in self.adjacency[u]:
            if w == v:
                return self.conductances[eid]
        raise GraphError(f"{u} and {v} are not adjacent")

    def degree(self, v: int) -> Scalar:
        """Weighted degree: the sum of conductances on edges at ``v``."""
        self._check_vertex(v)
        zero = Fraction(0) if self.exact else 0.0
        return sum((self.conductances[e] for _, e in self.adjacency[v]), zero)

    def degrees(self) -> list[Scalar]:
        return [self.degree(v) for v in range(self.n)]

    def total_conductance(self) -> Scalar:
        """``C = sum_v deg(v)``; equals ``2m`` for unit conductances."""
        zero = Fraction(0) if self.exact else 0.0
        return 2 * sum(self.conductances, zero)

    def is_unit(self) -> bool:
        return all(c == 1 for c in self.conductances)

    def is_connected(self) -> bool:
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for w, _ in self.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    queue.append(w)
        return count == self.n

    def distances_from(self, source: int) -> list[int]:
        """Hop distances from ``source``; ``-1`` marks unreachable vertices."""
        self._check_vertex(source)
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w, _ in self.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def edge_id(self, u: int, v: int) -> int:
        self._check_vertex(u)
        for w, eid in self.adjacency[u]:
            if w == v:
                return eid
        raise GraphError(f"{u} and {v} are not adjacent")

    # -- derived graphs ------------------------------------------------------

    def to_float(self) -> "Graph":
        if not self.exact:
            return self
        return Graph(self.n, self.edges, tuple(float(c) for c in self.conductances), False, self.labels)

    def without_edge(self, u: int, v: int) -> "Graph":
        eid = self.edge_id(u, v)
        keep = [e for e in range(self.m) if e != eid]
        return Graph(
            self.n,
            tuple(self.edges[e] for e in keep),
            tuple(self.conductances[e] for e in keep),
            self.exact,
            self.labels,
        )

    def laplacian(self) -> sparse.csr_matrix:
        """Float weighted Laplacian ``D - A`` as CSR."""
        n = self.n
        if self.m == 0:
            return sparse.csr_matrix((n, n))
        e = np.asarray(self.edges, dtype=np.int64)
        c = np.asarray([float(x) for x in self.conductances])
        rows = np.concatenate([e[:, 0], e[:, 1], e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0], e[:, 0], e[:, 1]])
        vals = np.concatenate([-c, -c, c, c])
        return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.exact == other.exact
            and dict(zip(self.edges, self.conductances)) == dict(zip(other.edges, other.conductances))
        )

    __hash__ = object.__hash__

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"Graph(n={self.n}, m={self.m}, {kind})"


def degree(g: Graph, v: int) -> Scalar:
    return g.degree(v)


def is_connected(g: Graph) -> bool:
    return g.is_connected()


def subdivide(g: Graph) -> Graph:
    """Insert a vertex in the middle of every edge.

    Original ids are kept and the vertex splitting edge ``e`` gets id
    ``n + e``. Both halves inherit the edge's conductance, so a unit resistor
    becomes two unit resistors in series.
    """
    n = g.n
    edges = []
    cs = []
    for eid, (u, v) in enumerate(g.edges):
        c = g.conductances[eid]
        edges.append((u, n + eid))
        edges.append((v, n + eid))
        cs.extend([c, c])
    labels = tuple([ORIGINAL] * n + [SUBDIVIDING] * g.m)
    return Graph(n + g.m, tuple(edges), tuple(cs), g.exact, labels)


# -- edge-list text format ---------------------------------------------------


def _parse_conductance(tok: str, lineno: int, kind: str) -> Scalar:
    try:
        if kind == "float":
            if "/" in tok:
                p, q = tok.split("/")
                val = int(p) / int(q)
            else:
                val = float(tok)
        else:
            val = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise EdgeListFormatError(lineno, f"bad conductance {tok!r}") from None
    if not val > 0:
        raise EdgeListFormatError(lineno, f"non-positive conductance {tok!r}")
    return val


def parse_edge_list(text: str, kind: str | None = None) -> Graph:
    """Parse ``u v [conductance]`` lines.

    ``kind`` is ``"exact"`` or ``"float"``; when omitted, a ``# scalar: float``
    header selects float, otherwise conductances are read as exact rationals
    (decimals such as ``2.5`` are exact). A ``# vertices: N`` header pads the
    vertex count beyond the largest id.
    """
    lines = text.splitlines()
    header_n = 0
    if kind is None:
        kind = "exact"
        for raw in lines:
            s = raw.strip()
            if s.startswith("#") and s[1:].strip().lower().replace(" ", "") == "scalar:float":
                kind = "float"
    if kind not in ("exact", "float"):
        raise ValueError(f"unknown scalar kind {kind!r}")
    edges, cs = [], []
    seen: dict[tuple[int, int], int] = {}
    max_id = -1
    for lineno, raw in enumerate(lines, start=1):
        s = raw.strip()
        if s.startswith("#"):
            body = s[1:].strip().lower()
            if body.startswith("vertices:"):
                try:
                    header_n = int(body.split(":", 1)[1])
                except ValueError:
                    raise EdgeListFormatError(lineno, "bad vertices header") from None
            continue
        s = s.split("#", 1)[0].strip()
        if not s:
            continue
        toks = s.split()
        if len(toks) not in (2, 3):
            raise EdgeListFormatError(lineno, f"expected 'u v [conductance]', got {raw!r}")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise EdgeListFormatError(lineno, f"bad vertex id in {raw!r}") from None
        if u < 0 or v < 0:
            raise EdgeListFormatError(lineno, "negative vertex id")
        if u == v:
            raise EdgeListFormatError(lineno, f"self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListFormatError(lineno, f"duplicate edge {u} {v} (first on line {seen[key]})")
        seen[key] = lineno
        if len(toks) == 3:
            c = _parse_conductance(toks[2], lineno, kind)
        else:
            c = Fraction(1) if kind == "exact" else 1.0
        edges.append(key)
        cs.append(c)
        max_id = max(max_id, u, v)
    n = max(max_id + 1, header_n, 1)
    return Graph(n, tuple(edges), tuple(cs), kind == "exact")


def load_edge_list(source: Union[str, Path, TextIO], kind: str | None = None) -> Graph:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    return parse_edge_list(text, kind)


def _format_conductance(c: Scalar) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(float(c))


def format_edge_list(g: Graph) -> str:
    out = io.StringIO()
    out.write(f"# scalar: {'exact' if g.exact else 'float'}\n")
    out.write(f"# vertices: {g.n}\n")
    for (u, v), c in zip(g.edges, g.conductances):
        if c == 1 and g.exact:
            out.write(f"{u} {v}\n")
        else:
            out.write(f"{u} {v} {_format_conductance(c)}\n")
    return out.getvalue()


def save_edge_list(g: Graph, sink: Union[str, Path, TextIO]) -> None:
    text = format_edge_list(g)
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text)
    else:
        sink.write(text)
