import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fosterlab import exact
from fosterlab.checks import (
    complete_graph,
    cycle_graph,
    grid_graph,
    path_graph,
    petersen_graph,
    random_connected_graph,
    with_random_conductances,
)
from fosterlab.exact import DisconnectedGraphError, OracleError
from fosterlab.graph import Graph


def test_series_path():
    assert exact.exact_resistance(path_graph(3), 0, 2) == 2


def test_cycle_adjacent():
    assert exact.exact_resistance(cycle_graph(4), 0, 1) == Fraction(3, 4)


def test_complete_graph():
    g = complete_graph(4)
    assert all(exact.exact_resistance(g, i, j) == Fraction(1, 2) for i in range(4) for j in range(i + 1, 4))


def test_petersen_adjacent():
    g = petersen_graph()
    u, v = g.edges[0]
    assert exact.exact_resistance(g, u, v) == Fraction(3, 5)


def test_regular_edge_transitive_formula():
    # 2(n-1)/(kn) on edge-transitive k-regular graphs
    for g, k in [(complete_graph(6), 5), (cycle_graph(7), 2), (petersen_graph(), 3)]:
        u, v = g.edges[0]
        assert exact.exact_resistance(g, u, v) == Fraction(2 * (g.n - 1), k * g.n)


def test_parallel_conductances():
    g = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)], [1, 1, 2])
    # 2 in parallel with the series pair of unit resistors (resistance 2)
    assert exact.exact_resistance(g, 0, 2) == Fraction(2, 5)


def test_same_vertex_is_zero():
    assert exact.exact_resistance(cycle_graph(5), 2, 2) == 0


def test_disconnected_raises():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(DisconnectedGraphError):
        exact.exact_resistance(g, 0, 3)
    with pytest.raises(DisconnectedGraphError):
        exact.exact_hitting_times(g)


def test_float_graph_refused():
    with pytest.raises(OracleError):
        exact.exact_resistance(path_graph(3).to_float(), 0, 2)


def test_size_cap():
    with pytest.raises(OracleError):
        exact.exact_resistance(path_graph(12), 0, 11, cap=10)


def test_matrix_matches_pairwise():
    g = with_random_conductances(grid_graph(3, 3), random.Random(3))
    R = exact.exact_resistance_matrix(g)
    for i in range(g.n):
        for j in range(g.n):
            assert R[i][j] == exact.exact_resistance(g, i, j)


def test_bareiss_against_numpy():
    rng = np.random.default_rng(0)
    A = rng.integers(-9, 10, size=(6, 6))
    A += 40 * np.eye(6, dtype=A.dtype)
    B = rng.integers(-9, 10, size=(6, 2))
    X = exact.bareiss_solve(A.tolist(), B.tolist())
    np.testing.assert_allclose(np.array(X, dtype=float), np.linalg.solve(A, B), rtol=1e-12)
    for r in range(6):
        for c in range(2):
            assert sum(A[r][t] * X[t][c] for t in range(6)) == B[r][c]


def test_bareiss_needs_pivoting():
    X = exact.bareiss_solve([[0, 1], [1, 0]], [[2], [3]])
    assert X == [[3], [2]]


def test_hitting_times_small():
    assert exact.exact_hitting_times(path_graph(2))[0][1] == 1
    H = exact.exact_hitting_times(cycle_graph(3))
    assert all(H[i][j] == 2 for i in range(3) for j in range(3) if i != j)
    assert exact.exact_hitting_times(path_graph(3))[0][1] == 1
    assert exact.exact_hitting_times(path_graph(3))[1][0] == 3


def test_hitting_diagonal_is_zero():
    H = exact.exact_hitting_times(petersen_graph())
    assert all(H[v][v] == 0 for v in range(10))


def test_traces():
    t = exact.exact_trace_powers(complete_graph(4), 3)
    assert t[0] == 4 and t[1] == 0 and t[2] == Fraction(4, 3)
    assert exact.exact_trace_powers(path_graph(2), 2)[2] == 2


def test_transition_rows_sum_to_one():
    g = with_random_conductances(petersen_graph(), random.Random(1))
    for M in exact.transition_powers(g, 4):
        assert all(sum(row) == 1 for row in M)


def test_stationary_distribution():
    assert exact.stationary_distribution(complete_graph(4)) == [Fraction(1, 4)] * 4
    assert exact.stationary_distribution(path_graph(3)) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]
    g = Graph.from_edges(3, [(0, 1), (1, 2)], [1, 3])
    assert exact.stationary_distribution(g) == [Fraction(1, 8), Fraction(4, 8), Fraction(3, 8)]


def test_stationary_is_invariant():
    g = with_random_conductances(grid_graph(3, 4), random.Random(5))
    pi = exact.stationary_distribution(g)
    P = exact.transition_matrix(g)
    assert [sum(pi[i] * P[i][j] for i in range(g.n)) for j in range(g.n)] == pi


def test_rayleigh_monotonicity_cycle():
    # cutting an edge of C6 leaves a path, so resistances can only grow
    g = cycle_graph(6)
    h = g.without_edge(0, 5)
    assert exact.exact_resistance(h, 0, 5) == 5 > exact.exact_resistance(g, 0, 5)


seeds = st.integers(0, 10_000)


@settings(max_examples=30)
@given(seeds)
def test_resistance_is_a_metric(seed):
    rng = random.Random(seed)
    g = with_random_conductances(random_connected_graph(rng, 3, 8), rng)
    R = exact.exact_resistance_matrix(g)
    n = g.n
    for i in range(n):
        assert R[i][i] == 0
        for j in range(n):
            assert R[i][j] == R[j][i]
            if i != j:
                assert R[i][j] > 0
            for k in range(n):
                assert R[i][k] <= R[i][j] + R[j][k]


@settings(max_examples=30)
@given(seeds)
def test_edge_resistance_bounded_by_edge(seed):
    rng = random.Random(seed)
    g = with_random_conductances(random_connected_graph(rng, 3, 8), rng)
    R = exact.exact_resistance_matrix(g)
    for (u, v), c in zip(g.edges, g.conductances):
        assert R[u][v] <= 1 / c


@settings(max_examples=30)
@given(seeds)
def test_fosters_first_rule(seed):
    rng = random.Random(seed)
    g = with_random_conductances(random_connected_graph(rng, 3, 9), rng)
    R = exact.exact_resistance_matrix(g)
    assert sum(c * R[u][v] for (u, v), c in zip(g.edges, g.conductances)) == g.n - 1


@settings(max_examples=30)
@given(seeds)
def test_commute_identity(seed):
    rng = random.Random(seed)
    g = with_random_conductances(random_connected_graph(rng, 3, 8), rng)
    H = exact.exact_hitting_times(g)
    R = exact.exact_resistance_matrix(g)
    C = g.total_conductance()
    for i in range(g.n):
        for j in range(g.n):
            assert H[i][j] + H[j][i] == C * R[i][j]
