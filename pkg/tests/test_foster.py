import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fosterlab import constants, foster
from fosterlab.checks import complete_graph, cycle_graph, grid_graph, petersen_graph, random_connected_graph
from fosterlab.checks import with_random_conductances
from fosterlab.graph import Graph
from fosterlab.lattice import Family


def test_first_rule_is_n_minus_one():
    for g in [complete_graph(5), petersen_graph(), grid_graph(3, 4)]:
        assert foster.finite_foster_lhs(g, 1) == 2 * (g.n - 1)


def test_second_rule():
    for g in [complete_graph(5), petersen_graph(), cycle_graph(7)]:
        assert foster.finite_foster_lhs(g, 2) == 2 * (g.n - 2)
        assert foster.finite_foster_rhs(g, 2) == 2 * (g.n - 2)


def test_k4_third():
    g = complete_graph(4)
    assert foster.finite_foster_lhs(g, 3) == Fraction(14, 3)
    assert foster.finite_foster_rhs(g, 3) == 2 * (4 + 0 + Fraction(4, 3) - 3)


def test_walk_enumeration_agrees_with_matrix_form():
    g = with_random_conductances(grid_graph(3, 3), random.Random(4))
    for r in (1, 2, 3):
        assert foster.finite_foster_lhs_by_walks(g, r) == foster.finite_foster_lhs(g, r)


def test_float_mode_close_to_exact():
    g = with_random_conductances(petersen_graph(), random.Random(8))
    for r in (1, 3, 5):
        rep = foster.finite_foster_check(g, r, "float")
        assert rep.kind == "float" and rep.holds(1e-9)
        assert float(foster.finite_foster_lhs(g, r)) == pytest.approx(rep.lhs, rel=1e-9)


def test_report_serialises_rationals():
    d = foster.finite_foster_check(complete_graph(4), 3).to_dict()
    assert d["lhs"] == "14/3" and d["residual"] == "0/1"


def test_hitting_trace_identity_examples():
    rep = foster.finite_hitting_trace_check(Graph.from_edges(2, [(0, 1)]), 1)
    assert rep.lhs == rep.rhs == 1
    rep = foster.finite_hitting_trace_check(complete_graph(4), 3)
    assert rep.lhs == rep.rhs == Fraction(7, 3)
    rep = foster.finite_hitting_trace_check(Graph.from_edges(3, [(0, 1), (1, 2)], [1, 3]), 2)
    assert rep.residual == 0


def test_r_must_be_positive():
    with pytest.raises(ValueError):
        foster.finite_hitting_trace_check(complete_graph(3), 0)
    with pytest.raises(ValueError):
        foster.infinite_sum_rule_rhs(4, [1], 0)


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.integers(1, 5))
def test_exact_identity_on_random_weighted_graphs(seed, r):
    rng = random.Random(seed)
    g = with_random_conductances(random_connected_graph(rng, 2, 9), rng)
    assert foster.finite_foster_check(g, r).residual == 0
    assert foster.finite_hitting_trace_check(g, r).residual == 0


@pytest.mark.parametrize("k", range(2, 9))
def test_infinite_rhs_low_orders(k):
    assert foster.infinite_sum_rule_rhs(k, [1, 0], 1) == 2
    assert foster.infinite_sum_rule_rhs(k, [1, 0], 2) == 2 * k
    assert foster.infinite_sum_rule_rhs(k, [1, 0, k], 3) == 2 * k * k + 2 * k
    assert foster.infinite_sum_rule_rhs(k, [1, 0, k, 0], 4) == 2 * k**3 + 2 * k**2


def test_triangular_fourth_rule():
    assert foster.infinite_sum_rule_rhs(6, [1, 0, 6, 12], 4) == 528
    assert foster.infinite_sum_rule_rhs(4, [1, 0, 4, 0], 2) == 8


def test_rhs_needs_enough_deltas():
    with pytest.raises(ValueError):
        foster.infinite_sum_rule_rhs(4, [1, 0], 3)


def test_nondegenerate_rules():
    assert foster.nondegenerate_rule_rhs(4, 3) == 26
    assert foster.nondegenerate_rule_rhs(3, 3) == 14
    assert foster.nondegenerate_rule_rhs(4, 4, triangle_free=True) == 80
    with pytest.raises(ValueError):
        foster.nondegenerate_rule_rhs(6, 4)


@pytest.mark.parametrize("k", range(2, 13))
def test_nondegenerate_by_census_subtraction(k):
    # the r = 3 degenerate walks reduce to (2k-1) copies of each edge walk
    assert foster.infinite_sum_rule_rhs(k, [1, 0, k], 3) - (2 * k - 1) * 2 == foster.nondegenerate_rule_rhs(k, 3)
    # r = 4: each 2-walk to a distance-2 vertex reappears as 3k-2 degenerate 4-walks
    full = foster.infinite_sum_rule_rhs(k, [1, 0, k, 0], 4)
    assert full - (3 * k - 2) * 2 * k == foster.nondegenerate_rule_rhs(k, 4, triangle_free=True)


def test_subdivision_examples():
    assert foster.subdivision_closed_forms(3) == (Fraction(5, 6), Fraction(4, 3), Fraction(3, 2), Fraction(11, 6))
    assert foster.subdivision_closed_forms(4) == (Fraction(3, 4), 1, Fraction(4, 3), Fraction(17, 12))


def test_subdivision_of_a_path():
    # k = 2: the subdivided infinite path is again a path of unit resistors
    assert foster.subdivision_closed_forms(2) == (1, 2, 2, 3)


@pytest.mark.parametrize("k", range(2, 13))
def test_subdivision_consistency(k):
    d1, d2a, d2b, d3 = foster.subdivision_closed_forms(k)
    assert d1 == foster.edge_resistance_from_degrees(k, 2)
    assert d2a == 2 * Fraction(2, k)
    assert foster.subdivision_balance(k) == (d1, d2a, d2b, d3)


def test_subdivision_rejects_small_degree():
    with pytest.raises(ValueError):
        foster.subdivision_closed_forms(1)


def test_edge_resistance_from_degrees():
    assert foster.edge_resistance_from_degrees(4, 4) == Fraction(1, 2)
    assert foster.edge_resistance_from_degrees(3, 2) == Fraction(5, 6)
    assert foster.edge_resistance_from_degrees(1, 1) == 2
    with pytest.raises(ValueError):
        foster.edge_resistance_from_degrees(0, 3)


def test_closed_form_table_values():
    table = constants.closed_form_table()
    assert len(table) == 14
    for cf in table:
        assert constants.evaluate(cf.expression) == pytest.approx(cf.value, abs=1e-14)
    assert constants.lookup("square", "2,1", False).value == pytest.approx(4 / math.pi - 0.5, abs=1e-15)
    assert constants.lookup("hexagonal", "d3", True).value == pytest.approx(11 / 6, abs=1e-15)


def test_closed_form_table_subdivided_entries_match_formula():
    forms = foster.subdivision_closed_forms(3)
    for name, value in zip(["d1", "d2a", "d2b", "d3"], forms):
        assert constants.lookup("hexagonal", name, True).value == pytest.approx(float(value), abs=1e-15)


def test_evaluator_refuses_code():
    with pytest.raises(ValueError):
        constants.evaluate("__import__('os')")


@pytest.mark.parametrize("family, r", [("square", 1), ("square", 2), ("square", 3), ("square", 4),
                                       ("triangular", 3), ("hexagonal", 3), ("hexagonal", 4)])
def test_lattice_sum_rules(family, r):
    rep = foster.infinite_sum_rule_lhs(family, r)
    k = Family.parse(family).degree
    assert rep.rhs == foster.infinite_sum_rule_rhs(k, foster.lattice_deltas(family, r).deltas, r)
    assert rep.holds(0.01)


def test_square_nondegenerate_third():
    rep = foster.infinite_sum_rule_lhs("square", 3, nondegenerate=True)
    assert rep.rhs == 26 and rep.holds(0.01)
    assert rep.census["form"] == "nondegenerate"


def test_square_nondegenerate_fourth():
    rep = foster.infinite_sum_rule_lhs("square", 4, nondegenerate=True)
    assert rep.rhs == 80 and rep.holds(0.01)


def test_midpoint_form():
    for family in Family:
        rep = foster.infinite_sum_rule_lhs(family, 2, midpoint=True)
        assert rep.rhs == family.degree and rep.holds(0.01), family


def test_truncated_square_first_rule_decomposition():
    rep = foster.infinite_sum_rule_lhs("truncated-square", 1)
    oo = constants.lookup("truncated-square", "octagon-octagon", False).value
    so = constants.lookup("truncated-square", "square-octagon", False).value
    # per vertex: one octagon-octagon edge and two square-octagon edges
    assert oo + 2 * so == pytest.approx(2, abs=1e-14)
    assert rep.lhs == pytest.approx(2, rel=0.01)
