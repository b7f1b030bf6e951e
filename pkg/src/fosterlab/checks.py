"""The reproduction checks run by ``fosterlab demo`` and the acceptance tests."""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import constants, exact, foster
from .graph import Graph
from .lattice import Ball, Family, boundary_fraction, build
from .randwalk import WalkSimConfig, commute_check
from .solver import DEFAULT_SIZES, ResistanceSolver, SolveConfig, infinite_pair_resistance

QUICK_SIZES = (12, 24, 48)


@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    target: object = None
    tolerance: float | None = None
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = [f"[{status}] {self.name}"]
        if self.value is not None:
            parts.append(f"value={_short(self.value)}")
        if self.target is not None:
            parts.append(f"target={_short(self.target)}")
        if self.tolerance is not None:
            parts.append(f"tol={self.tolerance:g}")
        parts.append(f"({self.seconds:.1f}s)")
        return " ".join(parts)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": _jsonable(self.value),
            "target": _jsonable(self.target),
            "tolerance": self.tolerance,
            "seconds": self.seconds,
            "detail": {k: _jsonable(v) for k, v in self.detail.items()},
        }


def _short(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def timed(fn: Callable[..., Check]) -> Callable[..., Check]:
    def wrapper(*args, **kwargs) -> Check:
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        out.seconds = time.perf_counter() - t0
        return out

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- graph suite -------------------------------------------------------------


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def grid_graph(rows: int, cols: int) -> Graph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def random_connected_graph(rng: random.Random, n_min: int = 4, n_max: int = 14, p: float | None = None) -> Graph:
    """Random spanning tree plus independent extra edges."""
    n = rng.randint(n_min, n_max)
    order = list(range(n))
    rng.shuffle(order)
    edges = {tuple(sorted((order[i], order[rng.randrange(i)]))) for i in range(1, n)}
    p = rng.uniform(0.1, 0.5) if p is None else p
    for u, v in itertools.combinations(range(n), 2):
        if (u, v) not in edges and rng.random() < p:
            edges.add((u, v))
    return Graph.from_edges(n, sorted(edges))


def with_random_conductances(g: Graph, rng: random.Random, max_part: int = 5) -> Graph:
    cs = [Fraction(rng.randint(1, max_part), rng.randint(1, max_part)) for _ in range(g.m)]
    return Graph(g.n, g.edges, tuple(cs), True, g.labels)


def finite_suite(seed: int = 2024, random_graphs: int = 20, weighted: bool = True) -> list[tuple[str, Graph]]:
    """K4, K5, Petersen, C5-C9, 4x4 and 5x5 grids, seeded random graphs.

    With ``weighted=True`` every graph also appears with random rational
    conductances.
    """
    rng = random.Random(seed)
    base = [("K4", complete_graph(4)), ("K5", complete_graph(5)), ("Petersen", petersen_graph())]
    base += [(f"C{n}", cycle_graph(n)) for n in range(5, 10)]
    base += [("grid4x4", grid_graph(4, 4)), ("grid5x5", grid_graph(5, 5))]
    base += [(f"random{i}", random_connected_graph(rng)) for i in range(random_graphs)]
    if not weighted:
        return base
    return base + [(f"{name}-weighted", with_random_conductances(g, rng)) for name, g in base]


# -- checks ------------------------------------------------------------------


@timed
def check_exact_foster(suite, rs=range(1, 6)) -> Check:
    failures = []
    count = 0
    for name, g in suite:
        for r in rs:
            rep = foster.finite_foster_check(g, r, "exact", name)
            count += 1
            if rep.residual != 0:
                failures.append((name, r, rep.residual))
    return Check("exact Foster identity, r=1..5", not failures, f"{count} identities", "residual 0", 0.0,
                 detail={"failures": failures[:5]})


@timed
def check_hitting_identity(suite, rs=range(1, 6)) -> Check:
    failures = []
    count = 0
    for name, g in suite:
        pi = exact.stationary_distribution(g)
        H = exact.exact_hitting_times(g)
        powers = exact.transition_powers(g, max(rs))
        traces = [sum((M[v][v] for v in range(g.n)), Fraction(0)) for M in powers]
        n = g.n
        for r in rs:
            Pr = powers[r]
            lhs = sum((pi[j] * Pr[j][i] * H[i][j] for i in range(n) for j in range(n) if i != j and Pr[j][i]), Fraction(0))
            rhs = sum(traces[:r], Fraction(0)) - r
            count += 1
            if lhs != rhs:
                failures.append((name, r, lhs - rhs))
    return Check("hitting-time trace identity, r=1..5", not failures, f"{count} identities", "residual 0", 0.0,
                 detail={"failures": failures[:5]})


@timed
def check_commute_exact(suite) -> Check:
    failures = []
    for name, g in suite:
        H = exact.exact_hitting_times(g)
        R = exact.exact_resistance_matrix(g)
        C = g.total_conductance()
        for i in range(g.n):
            for j in range(i + 1, g.n):
                if H[i][j] + H[j][i] != C * R[i][j]:
                    failures.append((name, i, j))
    return Check("commute identity E_iT_j + E_jT_i = C R_ij (exact)", not failures, len(suite), "residual 0", 0.0,
                 detail={"failures": failures[:5]})


def commute_cases() -> list[tuple[str, Graph, int, int]]:
    return [
        ("C3", cycle_graph(3), 0, 1),
        ("C4", cycle_graph(4), 0, 2),
        ("K4", complete_graph(4), 0, 1),
        ("P3-weighted", Graph.from_edges(3, [(0, 1), (1, 2)], [1, 3]), 0, 2),
    ]


@timed
def check_commute_mc(replications: int = 100_000, seed: int = 1, z_max: float = 3.0) -> Check:
    cfg = WalkSimConfig(seed=seed, replications=replications)
    zs = {}
    for name, g, i, j in commute_cases():
        zs[name] = commute_check(g, i, j, cfg).z
    worst = max(zs.values())
    return Check(f"Monte Carlo commute times, {replications} replications", worst <= z_max, worst, f"z <= {z_max}",
                 z_max, detail={"z": zs})


LATTICE_CONSTANTS = [
    ("square", "1,0"),
    ("square", "2,1"),
    ("square", "3,0"),
    ("triangular", "d1"),
    ("triangular", "turn60"),
    ("triangular", "straight2"),
    ("hexagonal", "d1"),
    ("hexagonal", "d2"),
    ("truncated-square", "octagon-octagon"),
    ("truncated-square", "square-octagon"),
]

SUBDIVIDED_CONSTANTS = ["d1", "d2a", "d2b", "d3"]


@timed
def check_lattice_constant(family: str, pair: str, sizes=DEFAULT_SIZES, tol: float = 5e-3, subdivided: bool = False) -> Check:
    rep = infinite_pair_resistance(family, pair, SolveConfig(), sizes, subdivided=subdivided)
    target = rep.closed_form.value
    label = f"{'subdivided ' if subdivided else ''}{family} {pair} -> {rep.closed_form.expression}"
    return Check(label, abs(rep.value - target) <= tol, rep.value, target, tol,
                 detail={"torus_values": rep.extrapolation.values, "sizes": list(sizes)})


SUM_RULES = [
    ("square", 3, {"nondegenerate": True}),
    ("triangular", 2, {}),
    ("triangular", 4, {}),
    ("truncated-square", 1, {}),
    ("hexagonal", 2, {}),
]


@timed
def check_sum_rule(family: str, r: int, opts: dict, sizes=DEFAULT_SIZES, rel_tol: float = 0.01) -> Check:
    rep = foster.infinite_sum_rule_lhs(family, r, SolveConfig(), sizes=sizes, **opts)
    form = rep.census.get("form")
    return Check(f"{family} sum rule r={r} ({form})", rep.holds(rel_tol), rep.lhs, rep.rhs, rel_tol,
                 detail=rep.census)


@timed
def check_subdivision_identities(ks=range(2, 13)) -> Check:
    bad = []
    for k in ks:
        d1, d2a, d2b, d3 = foster.subdivision_closed_forms(k)
        balance = foster.subdivision_balance(k)
        if d1 != foster.edge_resistance_from_degrees(k, 2) or d2a != 2 * Fraction(2, k):
            bad.append(k)
        elif balance != (d1, d2a, d2b, d3):
            bad.append(k)
    return Check("subdivision closed forms vs degree formula and balance counts, k=2..12", not bad, len(list(ks)),
                 "exact", 0.0, detail={"failing_k": bad})


@timed
def check_smallish(radii=range(1, 41), threshold: float = 0.15) -> Check:
    fr = [boundary_fraction(build(Family.SQUARE, Ball(m))) for m in radii]
    decreasing = all(b < a for a, b in zip(fr, fr[1:]))
    return Check(f"square ball boundary fraction decreasing, < {threshold} at m={radii[-1]}",
                 decreasing and fr[-1] < threshold, fr[-1], threshold, None,
                 detail={"fractions": [round(x, 6) for x in fr]})


@timed
def check_oracle_agreement(suite, tol: float = 1e-8) -> Check:
    worst = 0.0
    for _, g in suite:
        R = exact.exact_resistance_matrix(g)
        solver = ResistanceSolver(g.to_float())
        for i in range(g.n):
            for j in range(i + 1, g.n):
                worst = max(worst, abs(solver.resistance(i, j).value - float(R[i][j])))
    return Check("CG vs exact oracle on the suite", worst <= tol, worst, 0.0, tol)


@timed
def check_random_properties(count: int = 200, seed: int = 7, sym_tol: float = 1e-12) -> Check:
    """Symmetry, oracle agreement and edge-deletion monotonicity on random graphs."""
    rng = random.Random(seed)
    sym_worst = agree_worst = 0.0
    monotone_violations = 0
    for _ in range(count):
        g = random_connected_graph(rng, 3, 12)
        if rng.random() < 0.5:
            g = with_random_conductances(g, rng)
        solver = ResistanceSolver(g.to_float())
        R = exact.exact_resistance_matrix(g)
        for _ in range(3):
            i, j = rng.sample(range(g.n), 2)
            a, b = solver.resistance(i, j).value, solver.resistance(j, i).value
            sym_worst = max(sym_worst, abs(a - b))
            agree_worst = max(agree_worst, abs(a - float(R[i][j])))
        for _ in range(2):
            u, v = g.edges[rng.randrange(g.m)]
            h = g.without_edge(u, v)
            if not h.is_connected():
                continue
            R2 = exact.exact_resistance_matrix(h)
            monotone_violations += sum(R2[a][b] < R[a][b] for a in range(g.n) for b in range(g.n))
    ok = sym_worst <= sym_tol and agree_worst <= 1e-8 and monotone_violations == 0
    return Check(f"random-graph properties ({count} graphs)", ok, agree_worst, 0.0, 1e-8,
                 detail={"symmetry_worst": sym_worst, "monotonicity_violations": monotone_violations})


def run_all(quick: bool = False, progress: Callable[[Check], None] | None = None) -> list[Check]:
    """Every reproduction check; ``quick`` uses smaller tori and looser tolerances."""
    sizes = QUICK_SIZES if quick else DEFAULT_SIZES
    const_tol = 1e-2 if quick else 5e-3
    rule_tol = 0.02 if quick else 0.01
    suite = finite_suite(random_graphs=5 if quick else 20)
    jobs: list[Callable[[], Check]] = [
        lambda: check_exact_foster(suite),
        lambda: check_hitting_identity(suite),
        lambda: check_commute_exact(suite),
        lambda: check_commute_mc(20_000 if quick else 100_000),
    ]
    for fam, pair in LATTICE_CONSTANTS:
        jobs.append(lambda fam=fam, pair=pair: check_lattice_constant(fam, pair, sizes, const_tol))
    for fam, r, opts in SUM_RULES:
        jobs.append(lambda fam=fam, r=r, opts=opts: check_sum_rule(fam, r, opts, sizes, rule_tol))
    for pair in SUBDIVIDED_CONSTANTS:
        jobs.append(lambda pair=pair: check_lattice_constant("hexagonal", pair, sizes, const_tol, subdivided=True))
    jobs.append(check_subdivision_identities)
    jobs.append(check_smallish)
    jobs.append(lambda: check_oracle_agreement(suite))
    jobs.append(lambda: check_random_properties(40 if quick else 200))
    out = []
    for job in jobs:
        c = job()
        out.append(c)
        if progress:
            progress(c)
    return out


def closed_form_provenance() -> list[dict]:
    return [cf.to_dict() for cf in constants.closed_form_table()]
