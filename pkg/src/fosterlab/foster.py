"""Foster sum rules: exact finite identities and infinite-lattice versions.

Finite graphs
    ``sum_i sum_{walks i=v0..vr=j} w(walk) R_ij = 2 (sum_{s<r} tr(P^s) - r)``
    where ``w = prod(C along walk) / (deg(v1) ... deg(v_{r-1}))``; with unit
    conductances the numerator is 1.

Infinite vertex-transitive lattices of degree ``k``
    ``sum_{walks v=v0..vr=j} R_vj = 2 k^(r-1) sum_{s<r} Delta_s / k^s``
    with ``Delta_s`` the number of closed walks of length ``s``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import exact
from .graph import Graph
from .lattice import Family, LatticeGraph, Site, Torus, build
from .solver import DEFAULT_SIZES, ResistanceSolver, SolveConfig, sweep_pair
from .walks import WalkCountTable, enumerate_walks, is_degenerate, walk_count_table

Number = Union[Fraction, float]


def fmt(x) -> Union[str, float, int, None]:
    """JSON-friendly scalar: rationals as ``"p/q"``, floats unchanged."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


@dataclass
class SumRuleReport:
    context: str
    r: int
    lhs: Number
    rhs: Number
    kind: str
    census: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def residual(self) -> Number:
        return self.lhs - self.rhs

    @property
    def relative_error(self) -> float:
        return abs(float(self.residual)) / max(abs(float(self.rhs)), 1e-300)

    def holds(self, rel_tol: float = 0.0) -> bool:
        if self.kind == "exact":
            return self.residual == 0
        return self.relative_error <= rel_tol

    def to_dict(self) -> dict:
        return {
            "context": self.context,
            "r": self.r,
            "lhs": fmt(self.lhs),
            "rhs": fmt(self.rhs),
            "residual": fmt(self.residual),
            "relative_error": self.relative_error,
            "kind": self.kind,
            "census": dict(self.census),
            "notes": list(self.notes),
        }


# -- finite graphs -----------------------------------------------------------


def _walk_weights_exact(g: Graph, r: int) -> list[list[Fraction]]:
    """``W[i][j] = sum over length-r walks i->j of prod(C) / prod(interior deg)``."""
    deg = g.degrees()
    n = g.n
    W = []
    for i in range(n):
        vec = [Fraction(0)] * n
        for w, e in g.adjacency[i]:
            vec[w] += g.conductances[e]
        for _ in range(r - 1):
            nxt = [Fraction(0)] * n
            for u, val in enumerate(vec):
                if val:
                    scaled = val / deg[u]
                    for w, e in g.adjacency[u]:
                        nxt[w] += scaled * g.conductances[e]
            vec = nxt
        W.append(vec)
    return W


def _walk_weights_float(g: Graph, r: int) -> np.ndarray:
    A = (-g.laplacian()).toarray()
    np.fill_diagonal(A, 0.0)
    deg = A.sum(axis=1)
    W = A.copy()
    for _ in range(r - 1):
        W = (W / deg) @ A
    return W


def finite_foster_lhs(g: Graph, r: int, mode: str = "exact", cfg: SolveConfig | None = None) -> Number:
    """Weighted sum of ``R_ij`` over all length-``r`` walks."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if mode == "exact":
        R = exact.exact_resistance_matrix(g)
        W = _walk_weights_exact(g, r)
        return sum((W[i][j] * R[i][j] for i in range(g.n) for j in range(g.n) if W[i][j] and i != j), Fraction(0))
    if mode == "float":
        fg = g.to_float()
        W = _walk_weights_float(fg, r)
        solver = ResistanceSolver(fg, cfg)
        total = 0.0
        for i in range(g.n):
            for j in range(i + 1, g.n):
                w = W[i, j] + W[j, i]
                if w:
                    total += w * solver.resistance(i, j).value
        return total
    raise ValueError(f"unknown mode {mode!r}")


def finite_foster_lhs_by_walks(g: Graph, r: int) -> Fraction:
    """Same sum as :func:`finite_foster_lhs`, by explicit walk enumeration."""
    R = exact.exact_resistance_matrix(g)
    deg = g.degrees()
    total = Fraction(0)
    for i in range(g.n):
        for walk in enumerate_walks(g, i, r):
            weight = Fraction(1)
            for a, b in zip(walk, walk[1:]):
                weight *= g.conductance(a, b)
            for v in walk[1:-1]:
                weight /= deg[v]
            total += weight * R[i][walk[-1]]
    return total


def finite_foster_rhs(g: Graph, r: int, mode: str = "exact") -> Number:
    """``2 (sum_{s=0}^{r-1} tr(P^s) - r)``."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if mode == "exact":
        traces = exact.exact_trace_powers(g, r - 1)
        return 2 * (sum(traces, Fraction(0)) - r)
    fg = g.to_float()
    A = (-fg.laplacian()).toarray()
    np.fill_diagonal(A, 0.0)
    P = A / A.sum(axis=1)[:, None]
    acc, M = 0.0, np.eye(g.n)
    for _ in range(r):
        acc += np.trace(M)
        M = M @ P
    return 2 * (acc - r)


def finite_foster_check(g: Graph, r: int, mode: str = "exact", context: str = "graph") -> SumRuleReport:
    lhs = finite_foster_lhs(g, r, mode)
    rhs = finite_foster_rhs(g, r, mode)
    return SumRuleReport(f"finite:{context}", r, lhs, rhs, mode, {"n": g.n, "m": g.m})


def finite_hitting_trace_check(g: Graph, r: int, context: str = "graph") -> SumRuleReport:
    """``sum_{i,j} pi_j P^r_ji E_i T_j = sum_{s<r} tr(P^s) - r`` in exact arithmetic."""
    if r < 1:
        raise ValueError("r must be >= 1")
    pi = exact.stationary_distribution(g)
    H = exact.exact_hitting_times(g)
    powers = exact.transition_powers(g, r)
    Pr = powers[r]
    n = g.n
    lhs = sum((pi[j] * Pr[j][i] * H[i][j] for i in range(n) for j in range(n) if Pr[j][i] and i != j), Fraction(0))
    rhs = sum((sum((M[v][v] for v in range(n)), Fraction(0)) for M in powers[:r]), Fraction(0)) - r
    return SumRuleReport(f"hitting:{context}", r, lhs, rhs, "exact", {"n": n, "m": g.m})


# -- closed forms ------------------------------------------------------------


def infinite_sum_rule_rhs(k: int, deltas: Union[WalkCountTable, Sequence[int]], r: int) -> Fraction:
    """``2 k^(r-1) sum_{s=0}^{r-1} Delta_s / k^s`` (needs ``Delta_0..Delta_{r-1}``)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if len(deltas) < r:
        raise ValueError(f"need closed-walk counts up to s = {r - 1}, got {len(deltas)}")
    return 2 * Fraction(k) ** (r - 1) * sum((Fraction(deltas[s], k**s) for s in range(r)), Fraction(0))


def nondegenerate_rule_rhs(k: int, r: int, triangle_free: bool = False) -> Fraction:
    """Sum over walks that do not fold back: ``2k^2-2k+2`` (r=3), ``2k^3-4k^2+4k`` (r=4)."""
    if r == 3:
        return Fraction(2 * k * k - 2 * k + 2)
    if r == 4:
        if not triangle_free:
            raise ValueError("the r = 4 non-degenerate rule assumes a triangle-free lattice")
        return Fraction(2 * k**3 - 4 * k * k + 4 * k)
    raise ValueError("non-degenerate rules exist for r = 3 and r = 4 only")


def subdivision_closed_forms(k: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Resistances in the subdivided lattice of a degree-``k`` lattice.

    Order: adjacent; distance 2 between original vertices; distance 2 between
    subdividing vertices; distance 3.
    """
    if k < 2:
        raise ValueError("degree must be >= 2")
    k = Fraction(k)
    return (
        (k + 2) / (2 * k),
        4 / k,
        k / (k - 1),
        (k * k + 5 * k - 2) / (2 * k * (k - 1)),
    )


def subdivision_balance(k: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """The same four resistances, re-derived from Foster's first three rules.

    Counts are per original vertex of a large ball in the subdivided lattice:
    ``1 + k/2`` vertices and ``k`` edges; 2-walks through a subdividing
    midpoint (``k`` of them, weight 1/2) or an original midpoint
    (``k(k-1)``, weight ``1/k``); 3-walks have ``deg(u1) deg(u2) = 2k``,
    ``2k(k-1)`` of them are genuine and ``2k(k+1)`` fold back onto an edge.
    Traces per original vertex: ``tr(P^0) = 1 + k/2``, ``tr(P^2) = 1``.
    """
    if k < 2:
        raise ValueError("degree must be >= 2")
    k = Fraction(k)
    vertices = 1 + k / 2
    r1 = 2 * vertices / (2 * k)
    r2a = 2 * (2 / k)
    r2b = (2 * vertices - k * r2a / 2) / (k - 1)
    r3 = (2 * (vertices + 1) - (k + 1) * r1) / (k - 1)
    return r1, r2a, r2b, r3


def edge_resistance_from_degrees(deg_i, deg_j) -> Fraction:
    """Edge resistance ``(deg i + deg j) / (deg i deg j)`` on edge-transitive lattices."""
    if deg_i <= 0 or deg_j <= 0:
        raise ValueError("degrees must be positive")
    di, dj = Fraction(deg_i), Fraction(deg_j)
    return (di + dj) / (di * dj)


# -- infinite lattices -------------------------------------------------------

# walks of length <= 4 from the origin stay clear of the wrap at this size
_REFERENCE_TORUS = 16


def _reference(family: Family) -> LatticeGraph:
    return build(family, Torus(_REFERENCE_TORUS))


def lattice_deltas(family, r: int) -> WalkCountTable:
    family = Family.parse(family)
    lg = _reference(family)
    return walk_count_table(lg.graph, lg.origin, r)


def _shift(site: Site, by: Site) -> Site:
    return site[0] - by[0], site[1] - by[1], site[2]


def infinite_sum_rule_lhs(
    family,
    r: int,
    cfg: SolveConfig | None = None,
    *,
    nondegenerate: bool = False,
    midpoint: bool = False,
    sizes: Sequence[int] = DEFAULT_SIZES,
    boundary: str = "torus",
) -> SumRuleReport:
    """Evaluate a lattice sum rule numerically and compare with its closed form.

    Walks of length ``r`` from the origin are grouped by endpoint; each
    endpoint's resistance is an extrapolated torus (or ball) value, weighted
    by how many walks reach it. ``midpoint=True`` (``r = 2`` only) sums
    ``R_xy`` over unordered pairs of distinct neighbours of the origin, so
    each 2-path is counted once.
    """
    family = Family.parse(family)
    if r < 1 or r > 4:
        raise ValueError("lattice sum rules are evaluated for 1 <= r <= 4")
    if midpoint and r != 2:
        raise ValueError("the midpoint form applies to r = 2")
    if nondegenerate and r not in (3, 4):
        raise ValueError("non-degenerate forms exist for r = 3 and r = 4")
    lg = _reference(family)
    g, o = lg.graph, lg.origin
    k = family.degree

    pairs: Counter = Counter()
    total = degenerate = 0
    if midpoint:
        nbrs = g.neighbors(o)
        for idx, x in enumerate(nbrs):
            for y in nbrs[idx + 1 :]:
                total += 1
                pairs[(lg.displacement(x), lg.displacement(y))] += 1
    else:
        for walk in enumerate_walks(g, o, r):
            total += 1
            if nondegenerate and is_degenerate(walk):
                degenerate += 1
                continue
            end = walk[-1]
            if end != o:
                pairs[((0, 0, 0), lg.displacement(end))] += 1

    cache: dict[tuple[Site, Site], float] = {}
    lhs = 0.0
    for (a, b), mult in sorted(pairs.items()):
        key = ((0, 0, a[2]), _shift(b, a))
        if key not in cache:
            sa, sb = key
            ext = sweep_pair(
                family,
                lambda L, sa=sa, sb=sb: (L.vertex(sa), L.vertex(sb)),
                cfg,
                sizes,
                boundary,
            )
            cache[key] = ext.limit
        lhs += mult * cache[key]

    if midpoint:
        rhs = Fraction(k)
        form = "midpoint"
    elif nondegenerate:
        rhs = nondegenerate_rule_rhs(k, r, family.triangle_free)
        form = "nondegenerate"
    else:
        rhs = infinite_sum_rule_rhs(k, lattice_deltas(family, r), r)
        form = "all-walks"
    census = {"walks": total, "excluded": degenerate, "distinct_pairs": len(cache), "form": form}
    notes = [f"{boundary} sizes {list(sizes)}, extrapolated per endpoint class"]
    return SumRuleReport(f"lattice:{family.value}", r, lhs, float(rhs), "float", census, notes)
