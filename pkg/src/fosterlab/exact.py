"""Exact rational linear algebra on small graphs.

Everything here works over :class:`fractions.Fraction` and Python integers.
Linear systems are solved by fraction-free (Bareiss) elimination on an
integer-scaled copy of the matrix, so nothing is ever rounded.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .graph import Graph, GraphError

DEFAULT_CAP = 400

Matrix = list[list[Fraction]]


class DisconnectedGraphError(GraphError):
    pass


class OracleError(ValueError):
    """The exact oracle refuses this input (float graph, size cap)."""


def _check(g: Graph, cap: int) -> None:
    if not g.exact:
        raise OracleError("exact oracle needs an exact-rational graph")
    if g.n > cap:
        raise OracleError(f"graph has {g.n} vertices, over the oracle cap of {cap}")
    if not g.is_connected():
        raise DisconnectedGraphError("graph is disconnected")


def _lcm_denominators(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v.denominator)
    return out


def bareiss_solve(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    """Solve ``A X = B`` for square nonsingular integer ``A``.

    ``B`` is given row-major (``len(B) == len(A)``), possibly with several
    columns. Forward elimination is Bareiss' fraction-free scheme; only the
    final back substitution uses rationals.
    """
    n = len(A)
    if n == 0:
        return []
    p = len(B[0])
    M = [list(A[i]) + list(B[i]) for i in range(n)]
    width = n + p
    prev = 1
    for k in range(n):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    break
            else:
                raise OracleError("singular system")
        mk = M[k]
        pivot = mk[k]
        for i in range(k + 1, n):
            mi = M[i]
            f = mi[k]
            if f == 0:
                for j in range(k + 1, width):
                    mi[j] = mi[j] * pivot // prev
            else:
                for j in range(k + 1, width):
                    mi[j] = (mi[j] * pivot - f * mk[j]) // prev
            mi[k] = 0
        prev = pivot
    X: Matrix = [[Fraction(0)] * p for _ in range(n)]
    for c in range(p):
        for i in range(n - 1, -1, -1):
            row = M[i]
            acc = Fraction(row[n + c])
            for j in range(i + 1, n):
                if row[j]:
                    acc -= row[j] * X[j][c]
            X[i][c] = acc / row[i]
    return X


def laplacian(g: Graph) -> Matrix:
    """Dense exact Laplacian ``D - A``."""
    n = g.n
    L = [[Fraction(0)] * n for _ in range(n)]
    for (u, v), c in zip(g.edges, g.conductances):
        L[u][v] -= c
        L[v][u] -= c
        L[u][u] += c
        L[v][v] += c
    return L


def _grounded_integer(g: Graph, drop: int) -> tuple[list[list[int]], list[int], int]:
    """Integer-scaled Laplacian minor without row/column ``drop``."""
    scale = _lcm_denominators(g.conductances)
    L = laplacian(g)
    keep = [v for v in range(g.n) if v != drop]
    Ai = [[int(L[r][c] * scale) for c in keep] for r in keep]
    return Ai, keep, scale


def exact_resistance(g: Graph, i: int, j: int, cap: int = DEFAULT_CAP) -> Fraction:
    """Effective resistance between ``i`` and ``j``.

    Grounds ``j`` and solves ``L' x = e_i``; the potential at ``i`` is the
    resistance.
    """
    _check(g, cap)
    g._check_vertex(i)
    g._check_vertex(j)
    if i == j:
        return Fraction(0)
    A, keep, scale = _grounded_integer(g, j)
    rhs = [[scale if v == i else 0] for v in keep]
    x = bareiss_solve(A, rhs)
    return x[keep.index(i)][0]


def grounded_inverse(g: Graph, cap: int = DEFAULT_CAP) -> Matrix:
    """Inverse of the Laplacian grounded at the last vertex, zero-padded."""
    _check(g, cap)
    n = g.n
    if n == 1:
        return [[Fraction(0)]]
    A, keep, scale = _grounded_integer(g, n - 1)
    eye = [[scale if r == c else 0 for c in range(n - 1)] for r in range(n - 1)]
    X = bareiss_solve(A, eye)
    G = [[Fraction(0)] * n for _ in range(n)]
    for r in range(n - 1):
        G[r][: n - 1] = X[r]
    return G


def exact_resistance_matrix(g: Graph, cap: int = DEFAULT_CAP) -> Matrix:
    """All-pairs resistances from one grounded inverse."""
    G = grounded_inverse(g, cap)
    n = g.n
    return [[G[a][a] + G[b][b] - 2 * G[a][b] for b in range(n)] for a in range(n)]


def exact_hitting_times(g: Graph, cap: int = DEFAULT_CAP) -> Matrix:
    """``H[i][j] = E_i T_j`` for the conductance-weighted walk.

    One solve per target ``j``: ``(D - A) h = deg`` with ``j`` removed, which
    is ``(I - P) h = 1`` off ``j`` multiplied through by the degrees.
    """
    _check(g, cap)
    n = g.n
    deg = g.degrees()
    scale = _lcm_denominators(g.conductances)
    L = laplacian(g)
    H = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        keep = [v for v in range(n) if v != j]
        if not keep:
            continue
        A = [[int(L[r][c] * scale) for c in keep] for r in keep]
        rhs = [[int(deg[r] * scale)] for r in keep]
        h = bareiss_solve(A, rhs)
        for idx, v in enumerate(keep):
            H[v][j] = h[idx][0]
    return H


def transition_matrix(g: Graph) -> Matrix:
    if not g.exact:
        raise OracleError("exact oracle needs an exact-rational graph")
    n = g.n
    deg = g.degrees()
    P = [[Fraction(0)] * n for _ in range(n)]
    for (u, v), c in zip(g.edges, g.conductances):
        P[u][v] = c / deg[u]
        P[v][u] = c / deg[v]
    return P


def transition_powers(g: Graph, r_max: int, cap: int = DEFAULT_CAP) -> list[Matrix]:
    """``[P^0, ..., P^r_max]`` by repeated right-multiplication with sparse ``P``."""
    if not g.exact:
        raise OracleError("exact oracle needs an exact-rational graph")
    if g.n > cap:
        raise OracleError(f"graph has {g.n} vertices, over the oracle cap of {cap}")
    if r_max < 0:
        raise ValueError("r_max must be >= 0")
    n = g.n
    deg = g.degrees()
    rows = [[(w, g.conductances[e] / deg[v]) for w, e in g.adjacency[v]] for v in range(n)]
    cur = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    out = [cur]
    for _ in range(r_max):
        nxt = []
        for a in range(n):
            acc = [Fraction(0)] * n
            for kk, val in enumerate(cur[a]):
                if val:
                    for w, p in rows[kk]:
                        acc[w] += val * p
            nxt.append(acc)
        cur = nxt
        out.append(cur)
    return out


def exact_trace_powers(g: Graph, r_max: int, cap: int = DEFAULT_CAP) -> list[Fraction]:
    """``[tr(P^0), ..., tr(P^r_max)]``."""
    return [sum((M[v][v] for v in range(g.n)), Fraction(0)) for M in transition_powers(g, r_max, cap)]


def stationary_distribution(g: Graph) -> list[Fraction]:
    if not g.exact:
        raise OracleError("exact oracle needs an exact-rational graph")
    C = g.total_conductance()
    if C == 0:
        raise DisconnectedGraphError("graph has no edges")
    return [d / C for d in g.degrees()]
