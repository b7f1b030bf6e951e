"""Floating-point effective resistance on large graphs.

Resistances come from the Laplacian grounded at the highest-index vertex,
solved with Jacobi-preconditioned conjugate gradients. Infinite-lattice
values are estimated by solving on a sequence of tori (or balls) and
extrapolating in the linear size.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import constants
from .graph import Graph, GraphError
from .lattice import _NAMED, Ball, Family, LatticeGraph, PairClass, Torus, build, resolve_pair

DEFAULT_SIZES = (16, 32, 64)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class ExtrapolationError(ValueError):
    pass


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-10
    max_iter: int | None = None
    preconditioner: str = "diagonal"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.preconditioner not in ("diagonal", "none"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")

    def iteration_cap(self, n: int) -> int:
        if self.max_iter is not None:
            return self.max_iter
        return max(50, int(20 * math.sqrt(n)))


@dataclass
class ExtrapolationResult:
    sizes: list[float]
    values: list[float]
    limit: float
    fit_residual: float
    model: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ResistanceReport:
    pair: tuple
    value: float
    method: str
    iterations: int = 0
    residual: float = 0.0
    error_estimate: float | None = None
    closed_form: constants.ClosedForm | None = None
    extrapolation: ExtrapolationResult | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "value": self.value,
            "method": self.method,
            "iterations": self.iterations,
            "residual": self.residual,
            "error_estimate": self.error_estimate,
            "closed_form": None if self.closed_form is None else self.closed_form.to_dict(),
            "extrapolation": None if self.extrapolation is None else self.extrapolation.to_dict(),
            "notes": list(self.notes),
        }


def pcg(A, b: np.ndarray, tol: float, max_iter: int, diag: np.ndarray | None = None):
    """Preconditioned CG for SPD ``A``; returns ``(x, iterations, rel_residual)``.

    Stops once the recomputed relative residual ``|b - Ax| / |b|`` is at most
    ``tol``; raises :class:`ConvergenceError` after ``max_iter`` iterations.
    """
    x = np.zeros_like(b)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return x, 0, 0.0
    inv = None if diag is None else 1.0 / diag
    r = b.copy()
    z = r if inv is None else inv * r
    p = z.copy()
    rz = r @ z
    res = 1.0
    for it in range(1, max_iter + 1):
        Ap = A @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        res = np.linalg.norm(r) / bnorm
        if res <= tol:
            true_r = b - A @ x
            res = np.linalg.norm(true_r) / bnorm
            if res <= tol:
                return x, it, float(res)
            r = true_r
        z = r if inv is None else inv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise ConvergenceError(
        f"CG did not reach relative residual {tol:g} in {max_iter} iterations (at {res:.3g})",
        max_iter,
        float(res),
    )


class ResistanceSolver:
    """Grounded Laplacian of one graph, reusable across many pair queries."""

    def __init__(self, g: Graph, cfg: SolveConfig | None = None):
        if g.n < 2:
            raise GraphError("need at least two vertices")
        if not g.is_connected():
            from .exact import DisconnectedGraphError

            raise DisconnectedGraphError("graph is disconnected")
        self.graph = g
        self.cfg = cfg or SolveConfig()
        self.ground = g.n - 1
        L = g.laplacian()
        self.A = L[: self.ground, : self.ground].tocsr()
        self.diag = self.A.diagonal() if self.cfg.preconditioner == "diagonal" else None
        self.max_iter = self.cfg.iteration_cap(g.n)

    def potentials(self, i: int, j: int) -> tuple[np.ndarray, int, float]:
        """Potentials (ground = 0) for unit current in at ``i``, out at ``j``."""
        b = np.zeros(self.ground)
        if i != self.ground:
            b[i] += 1.0
        if j != self.ground:
            b[j] -= 1.0
        x, it, res = pcg(self.A, b, self.cfg.tol, self.max_iter, self.diag)
        return np.append(x, 0.0), it, res

    def resistance(self, i: int, j: int, method: str = "cg") -> ResistanceReport:
        g = self.graph
        g._check_vertex(i)
        g._check_vertex(j)
        if i == j:
            raise GraphError("resistance needs two distinct vertices")
        x, it, res = self.potentials(i, j)
        return ResistanceReport((i, j), float(x[i] - x[j]), method, it, res)


def cg_resistance(g: Graph, i: int, j: int, cfg: SolveConfig | None = None) -> ResistanceReport:
    return ResistanceSolver(g, cfg).resistance(i, j)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("FOSTERLAB_THREADS", "1")))
    except ValueError:
        return 1


def batch_resistances_from(
    g: Graph | ResistanceSolver,
    source: int,
    targets: Sequence[int],
    cfg: SolveConfig | None = None,
    workers: int | None = None,
) -> list[ResistanceReport]:
    """One independent solve per target; results are in ``targets`` order."""
    solver = g if isinstance(g, ResistanceSolver) else ResistanceSolver(g, cfg)
    if any(t == source for t in targets):
        raise GraphError("targets must differ from the source")
    workers = workers or _threads()
    if workers <= 1 or len(targets) < 2:
        return [solver.resistance(source, t) for t in targets]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: solver.resistance(source, t), targets))


def extrapolate(sizes: Sequence[float], values: Sequence[float], model: str = "inv-poly") -> ExtrapolationResult:
    """Estimate the ``size -> infinity`` limit of ``values``.

    ``inv-poly`` fits ``v = v_inf + a/L + b/L^2`` by least squares over all
    points. ``richardson`` applies Aitken's delta-squared step to the last
    three points, which assumes geometrically spaced sizes.
    """
    sizes = [float(s) for s in sizes]
    values = [float(v) for v in values]
    if len(sizes) != len(values):
        raise ExtrapolationError("sizes and values differ in length")
    if len(sizes) < 3:
        raise ExtrapolationError("need at least three points")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ExtrapolationError("sizes must be strictly increasing")
    if model == "inv-poly":
        inv = 1.0 / np.asarray(sizes)
        X = np.column_stack([np.ones_like(inv), inv, inv**2])
        if np.linalg.matrix_rank(X) < 3:
            raise ExtrapolationError("degenerate fit")
        y = np.asarray(values)
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        resid = float(np.linalg.norm(X @ coef - y))
        return ExtrapolationResult(sizes, values, float(coef[0]), resid, model)
    if model == "richardson":
        v1, v2, v3 = values[-3:]
        d1, d2 = v2 - v1, v3 - v2
        if d2 == d1:
            if d1 == 0:
                return ExtrapolationResult(sizes, values, v3, 0.0, model)
            raise ExtrapolationError("degenerate fit (linear sequence)")
        return ExtrapolationResult(sizes, values, v3 - d2 * d2 / (d2 - d1), 0.0, model)
    raise ExtrapolationError(f"unknown model {model!r}")


@lru_cache(maxsize=16)
def lattice_solver(family: Family, mode, subdivided: bool, cfg: SolveConfig) -> tuple[LatticeGraph, ResistanceSolver]:
    lg = build(family, mode, subdivided=subdivided)
    return lg, ResistanceSolver(lg.graph, cfg)


def sweep_pair(
    family,
    resolve,
    cfg: SolveConfig | None = None,
    sizes: Sequence[int] = DEFAULT_SIZES,
    boundary: str = "torus",
    subdivided: bool = False,
    model: str = "inv-poly",
) -> ExtrapolationResult:
    """Solve one pair on each lattice size and extrapolate.

    ``resolve(lg) -> (u, v)`` picks the pair inside each lattice.
    """
    family = Family.parse(family)
    cfg = cfg or SolveConfig()
    values = []
    for size in sizes:
        mode = Torus(size) if boundary == "torus" else Ball(size)
        lg, solver = lattice_solver(family, mode, subdivided, cfg)
        u, v = resolve(lg)
        values.append(solver.resistance(u, v).value)
    return extrapolate(sizes, values, model)


def infinite_pair_resistance(
    family,
    pair_class: PairClass | str,
    cfg: SolveConfig | None = None,
    sizes: Sequence[int] = DEFAULT_SIZES,
    boundary: str = "torus",
    subdivided: bool = False,
    model: str = "inv-poly",
) -> ResistanceReport:
    """Infinite-lattice resistance of a pair class by size extrapolation."""
    family = Family.parse(family)
    if isinstance(pair_class, str):
        pair_class = PairClass.of(family, pair_class, subdivided)
    ext = sweep_pair(family, lambda lg: resolve_pair(lg, pair_class), cfg, sizes, boundary, pair_class.subdivided, model)
    cf = constants.lookup(family, canonical_pair_name(pair_class), pair_class.subdivided)
    report = ResistanceReport(
        (family.value, pair_class.descriptor),
        ext.limit,
        "extrapolated",
        error_estimate=abs(ext.limit - ext.values[-1]),
        closed_form=cf,
        extrapolation=ext,
        notes=[f"{boundary} sizes {list(sizes)}, model {model}"],
    )
    return report


def canonical_pair_name(pc: PairClass) -> str:
    if pc.family is Family.SQUARE and not pc.subdivided:
        a, b, _ = pc.displacement()
        a, b = sorted((abs(a), abs(b)), reverse=True)
        return f"{a},{b}"
    if not pc.subdivided and pc.descriptor not in _NAMED[pc.family]:
        disp = pc.displacement()
        for name, (named, _) in _NAMED[pc.family].items():
            if named == disp:
                return name
    return pc.descriptor
