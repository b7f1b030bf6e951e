"""Planar lattice families as finite balls or periodic tori.

Every lattice is described by integer unit cells ``(a, b)`` carrying one or
more sublattice sites ``s``; a vertex is the triple ``(a, b, s)``.

=================  =====  =====  ==========================================
family             k      sites  cell layout
=================  =====  =====  ==========================================
square             4      1      Z^2
triangular         6      1      Z^2 over basis (1, 0), (1/2, sqrt(3)/2)
hexagonal          3      2      honeycomb, A/B sites
truncated-square   3      4      small square E/N/W/S joined to neighbours
=================  =====  =====  ==========================================
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .graph import Graph, subdivide

Site = tuple[int, int, int]


class LatticeError(ValueError):
    pass


class Family(str, Enum):
    SQUARE = "square"
    TRIANGULAR = "triangular"
    HEXAGONAL = "hexagonal"
    TRUNCATED_SQUARE = "truncated-square"

    @classmethod
    def parse(cls, name: Union[str, "Family"]) -> "Family":
        if isinstance(name, Family):
            return name
        key = name.strip().lower().replace("_", "-")
        aliases = {"honeycomb": "hexagonal", "truncated": "truncated-square", "tri": "triangular",
                   "hex": "hexagonal", "sq": "square", "truncated-sq": "truncated-square"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise LatticeError(f"unknown lattice family {name!r}") from None

    @property
    def degree(self) -> int:
        return _DEGREE[self]

    @property
    def sites_per_cell(self) -> int:
        return len(_OFFSETS[self])

    @property
    def triangle_free(self) -> bool:
        return self is not Family.TRIANGULAR


_DEGREE = {
    Family.SQUARE: 4,
    Family.TRIANGULAR: 6,
    Family.HEXAGONAL: 3,
    Family.TRUNCATED_SQUARE: 3,
}

# neighbour offsets per sublattice: (da, db, target sublattice)
_OFFSETS: dict[Family, dict[int, tuple[Site, ...]]] = {
    Family.SQUARE: {0: ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))},
    Family.TRIANGULAR: {
        0: ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (1, -1, 0), (-1, 1, 0)),
    },
    Family.HEXAGONAL: {
        0: ((0, 0, 1), (-1, 0, 1), (0, -1, 1)),
        1: ((0, 0, 0), (1, 0, 0), (0, 1, 0)),
    },
    # sites 0..3 = E, N, W, S corners of the small square; square edges stay in
    # the cell, the remaining edge of each corner crosses an octagon pair
    Family.TRUNCATED_SQUARE: {
        0: ((0, 0, 1), (0, 0, 3), (1, 0, 2)),
        1: ((0, 0, 0), (0, 0, 2), (0, 1, 3)),
        2: ((0, 0, 1), (0, 0, 3), (-1, 0, 0)),
        3: ((0, 0, 0), (0, 0, 2), (0, -1, 1)),
    },
}

_SQ3 = math.sqrt(3.0)
_TS_SPACING = 1.0 + math.sqrt(2.0)
_TS_HALF = 1.0 / math.sqrt(2.0)


def site_neighbors(family: Family, site: Site) -> list[Site]:
    a, b, s = site
    return [(a + da, b + db, t) for da, db, t in _OFFSETS[family][s]]


def site_position(family: Family, site: Site) -> tuple[float, float]:
    """Euclidean embedding with unit edge length (informational only)."""
    a, b, s = site
    if family is Family.SQUARE:
        return float(a), float(b)
    if family is Family.TRIANGULAR:
        return a + b / 2, b * _SQ3 / 2
    if family is Family.HEXAGONAL:
        # cell vectors of length sqrt(3) give unit bonds
        x, y = _SQ3 * (a + b / 2), 1.5 * b
        return (x, y) if s == 0 else (x + _SQ3 / 2, y + 0.5)
    cx, cy = _TS_SPACING * a, _TS_SPACING * b
    dx, dy = [(_TS_HALF, 0.0), (0.0, _TS_HALF), (-_TS_HALF, 0.0), (0.0, -_TS_HALF)][s]
    return cx + dx, cy + dy


@dataclass(frozen=True)
class Ball:
    radius: int

    def __post_init__(self):
        if self.radius < 1:
            raise LatticeError("ball radius must be >= 1")


@dataclass(frozen=True)
class Torus:
    L: int

    def __post_init__(self):
        if self.L < 3:
            raise LatticeError("torus needs L >= 3 (smaller wraps create parallel edges)")


Mode = Union[Ball, Torus]


@dataclass(frozen=True, eq=False)
class LatticeGraph:
    """A lattice graph with its coordinate bookkeeping.

    For subdivided lattices ``coords`` holds ``None`` for subdividing vertices
    and ``base`` is the unsubdivided lattice whose ids are preserved.
    """

    graph: Graph
    origin: int
    coords: tuple[Site | None, ...]
    family: Family
    mode: Mode
    subdivided: bool = False
    base: "LatticeGraph | None" = None
    index: dict[Site, int] = field(default_factory=dict, repr=False)

    @property
    def k(self) -> int:
        return self.family.degree

    def vertex(self, site: Site) -> int:
        a, b, s = site
        if isinstance(self.mode, Torus):
            L = self.mode.L
            site = (a % L, b % L, s)
        try:
            return self.index[site]
        except KeyError:
            raise LatticeError(f"site {site} is not in this lattice") from None

    def midpoint(self, u: int, v: int) -> int:
        """Subdividing vertex between original vertices ``u`` and ``v``."""
        if not self.subdivided:
            raise LatticeError("lattice is not subdivided")
        return self.base.graph.n + self.base.graph.edge_id(u, v)

    def expected_degree(self, v: int) -> int:
        """Degree ``v`` would have in the infinite lattice."""
        if self.subdivided and v >= self.base.graph.n:
            return 2
        return self.k

    def displacement(self, v: int) -> Site:
        """Cell offset of ``v`` from the origin cell (wrapped on a torus)."""
        site = self.coords[v]
        if site is None:
            raise LatticeError("subdividing vertices have no cell coordinates")
        a, b, s = site
        if isinstance(self.mode, Torus):
            L = self.mode.L
            a = (a + L // 2) % L - L // 2
            b = (b + L // 2) % L - L // 2
        return a, b, s


def _from_sites(family: Family, sites: list[Site], mode: Mode) -> LatticeGraph:
    index = {site: i for i, site in enumerate(sites)}
    L = mode.L if isinstance(mode, Torus) else None
    edges = []
    for i, site in enumerate(sites):
        for a, b, s in site_neighbors(family, site):
            nb = (a % L, b % L, s) if L else (a, b, s)
            j = index.get(nb)
            if j is not None and j > i:
                edges.append((i, j))
    g = Graph.from_edges(len(sites), edges)
    return LatticeGraph(g, 0, tuple(sites), family, mode, index=index)


def _ball_sites(family: Family, radius: int) -> list[Site]:
    origin = (0, 0, 0)
    dist = {origin: 0}
    order = [origin]
    queue = deque([origin])
    while queue:
        site = queue.popleft()
        d = dist[site]
        if d == radius:
            continue
        for nb in site_neighbors(family, site):
            if nb not in dist:
                dist[nb] = d + 1
                order.append(nb)
                queue.append(nb)
    return order


def build(family: Union[str, Family], mode: Mode, *, subdivided: bool = False) -> LatticeGraph:
    """Generate a finite piece of ``family``.

    ``Ball(m)`` keeps every site within graph distance ``m`` of the origin
    site ``(0, 0, 0)`` (origin gets id 0, ids follow BFS order); ``Torus(L)``
    wraps ``L x L`` unit cells. With ``subdivided=True`` the result is the
    subdivision of that graph, original ids preserved.
    """
    family = Family.parse(family)
    if isinstance(mode, Ball):
        lg = _from_sites(family, _ball_sites(family, mode.radius), mode)
    elif isinstance(mode, Torus):
        L, S = mode.L, family.sites_per_cell
        sites = [(a, b, s) for a in range(L) for b in range(L) for s in range(S)]
        lg = _from_sites(family, sites, mode)
        if any(len(adj) != family.degree for adj in lg.graph.adjacency):
            raise LatticeError("torus is not regular; wrap produced a defect")
    else:
        raise LatticeError(f"unknown mode {mode!r}")
    if not subdivided:
        return lg
    sg = subdivide(lg.graph)
    coords = lg.coords + (None,) * lg.graph.m
    return LatticeGraph(sg, lg.origin, coords, family, mode, True, lg, lg.index)


def boundary_fraction(lg: LatticeGraph) -> float:
    """Share of vertices missing at least one of their infinite-lattice edges."""
    if isinstance(lg.mode, Torus):
        raise LatticeError("a torus has no boundary")
    g = lg.graph
    short = sum(1 for v in range(g.n) if len(g.adjacency[v]) < lg.expected_degree(v))
    return short / g.n


def swelling_sequence(family: Union[str, Family], radii: list[int], *, subdivided: bool = False) -> list[LatticeGraph]:
    if not radii:
        raise LatticeError("need at least one radius")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise LatticeError("radii must be strictly increasing")
    return [build(family, Ball(r), subdivided=subdivided) for r in radii]


# -- pair classes ------------------------------------------------------------

# named displacements from the origin site, with nominal graph distance
_NAMED: dict[Family, dict[str, tuple[Site, int]]] = {
    Family.SQUARE: {"d1": ((1, 0, 0), 1)},
    Family.TRIANGULAR: {
        "d1": ((1, 0, 0), 1),
        "turn60": ((1, 1, 0), 2),
        "straight2": ((2, 0, 0), 2),
    },
    Family.HEXAGONAL: {"d1": ((0, 0, 1), 1), "d2": ((1, 0, 0), 2)},
    Family.TRUNCATED_SQUARE: {
        "square-octagon": ((0, 0, 1), 1),
        "octagon-octagon": ((1, 0, 2), 1),
    },
}

_ALIASES: dict[Family, dict[str, str]] = {
    Family.SQUARE: {"edge": "d1", "1-path": "d1"},
    Family.TRIANGULAR: {"edge": "d1", "1-path": "d1", "turn-60": "turn60", "straight-2": "straight2"},
    Family.HEXAGONAL: {"edge": "d1", "1-path": "d1", "2-path": "d2"},
    Family.TRUNCATED_SQUARE: {"square": "square-octagon", "octagon": "octagon-octagon"},
}

SUBDIVIDED_CLASSES = {"d1": 1, "d2a": 2, "d2b": 2, "d3": 3}


@dataclass(frozen=True)
class PairClass:
    """A family of equivalent vertex pairs.

    ``descriptor`` is either a named class (``"d1"``, ``"straight2"``,
    ``"octagon-octagon"``, subdivided ``"d2a"``...) or an explicit cell
    displacement ``"a,b"`` / ``"a,b,s"`` from the origin site.
    """

    family: Family
    descriptor: str
    subdivided: bool = False

    @classmethod
    def of(cls, family, descriptor: str, subdivided: bool = False) -> "PairClass":
        family = Family.parse(family)
        key = descriptor.strip().lower().replace(" ", "")
        if not subdivided:
            key = _ALIASES[family].get(key, key)
        return cls(family, key, subdivided)

    def displacement(self) -> Site:
        if self.subdivided:
            raise LatticeError("subdivided classes are not plain displacements")
        named = _NAMED[self.family].get(self.descriptor)
        if named is not None:
            return named[0]
        try:
            parts = [int(p) for p in self.descriptor.split(",")]
        except ValueError:
            raise LatticeError(f"unknown pair class {self.descriptor!r} for {self.family.value}") from None
        if len(parts) == 2:
            parts.append(0)
        if len(parts) != 3 or not 0 <= parts[2] < self.family.sites_per_cell:
            raise LatticeError(f"bad displacement {self.descriptor!r}")
        return tuple(parts)

    def nominal_distance(self) -> int | None:
        if self.subdivided:
            return SUBDIVIDED_CLASSES.get(self.descriptor)
        named = _NAMED[self.family].get(self.descriptor)
        if named is not None:
            return named[1]
        a, b, s = self.displacement()
        if self.family is Family.SQUARE:
            return abs(a) + abs(b)
        if self.family is Family.TRIANGULAR:
            return (abs(a) + abs(b) + abs(a + b)) // 2
        return None


def resolve_pair(lg: LatticeGraph, pc: PairClass) -> tuple[int, int]:
    """Concrete ``(u, v)`` realising ``pc`` near the origin of ``lg``."""
    if pc.family is not lg.family:
        raise LatticeError(f"pair class for {pc.family.value} used on {lg.family.value}")
    if pc.subdivided != lg.subdivided:
        raise LatticeError("pair class and lattice disagree on subdivision")
    if pc.subdivided:
        return _resolve_subdivided(lg, pc.descriptor)
    a, b, s = pc.displacement()
    if isinstance(lg.mode, Torus) and 2 * max(abs(a), abs(b)) >= lg.mode.L - 1:
        raise LatticeError(f"displacement {(a, b, s)} wraps around a torus of size {lg.mode.L}")
    return lg.origin, lg.vertex((a, b, s))


def _resolve_subdivided(lg: LatticeGraph, name: str) -> tuple[int, int]:
    if name not in SUBDIVIDED_CLASSES:
        raise LatticeError(f"unknown subdivided pair class {name!r}")
    base = lg.base.graph
    o = lg.origin
    n1, n2 = base.neighbors(o)[:2]
    if name == "d1":
        return o, lg.midpoint(o, n1)
    if name == "d2a":
        return o, n1
    if name == "d2b":
        return lg.midpoint(o, n1), lg.midpoint(o, n2)
    x = next(w for w in base.neighbors(n1) if w != o)
    return o, lg.midpoint(n1, x)
