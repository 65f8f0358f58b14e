import itertools
import math
import random

import numpy as np
from hypothesis import given, settings, strategies as st
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from mtcut.flow import capforest, compute_bounds, isolating_cuts, isolating_witness, min_s_T_cut
from mtcut.graph import Graph
from mtcut.instances import generate_random_graph
from mtcut.oracle import oracle_weight


def side_weight(g, side):
    return sum(w for u, v, w in g.edges() if (u in side) != (v in side))


def all_optimal_sides(g, s, sinks):
    """Every vertex set containing s and avoiding sinks with minimum boundary."""
    free = [v for v in g.adj if v != s and v not in sinks]
    best, sides = math.inf, []
    for mask in range(1 << len(free)):
        side = {s} | {free[i] for i in range(len(free)) if mask >> i & 1}
        w = side_weight(g, side)
        if w < best:
            best, sides = w, [side]
        elif w == best:
            sides.append(side)
    return best, sides


def scipy_lambda(g, u, v):
    n = max(g.adj) + 1
    rows, cols, caps = [], [], []
    for a, b, w in g.edges():
        rows += [a, b]
        cols += [b, a]
        caps += [w, w]
    m = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)), shape=(n, n))
    return maximum_flow(m, u, v).flow_value


def test_path_bottleneck():
    g = Graph.from_edges(3, [(0, 1, 2), (1, 2, 3)], [0, 2])
    c = min_s_T_cut(g, 0, [2])
    assert c.value == 2
    # the cut is unique, so both sides coincide
    assert c.min_side == c.max_side == {0}
    g = Graph.from_edges(3, [(0, 1, 3), (1, 2, 2)], [0, 2])
    c = min_s_T_cut(g, 0, [2])
    assert c.value == 2
    assert c.min_side == c.max_side == {0, 1}


def test_sides_differ_on_ties():
    g = Graph.from_edges(3, [(0, 1, 2), (1, 2, 2)], [0, 2])
    c = min_s_T_cut(g, 0, [2])
    assert c.min_side == {0} and c.max_side == {0, 1}


def test_gex_isolating_cut_of_t1(g_ex):
    c = min_s_T_cut(g_ex, 0, [1, 2])
    assert c.value == 3
    assert c.max_side == {0, 3}
    assert side_weight(g_ex, {0, 3}) == 3
    best, sides = all_optimal_sides(g_ex, 0, {1, 2})
    assert best == 3 and {0, 3} in sides


def test_source_without_edges():
    g = Graph.from_edges(3, [(1, 2, 4)], [0, 1])
    assert min_s_T_cut(g, 0, [1]).value == 0


def test_gex_isolating_values(g_ex):
    cuts = isolating_cuts(g_ex)
    assert [c.value for c in cuts] == [3, 2, 2]


def test_star_isolating_cuts():
    g = Graph.from_edges(4, [(3, 0, 1), (3, 1, 1), (3, 2, 1)], [0, 1, 2])
    for c in isolating_cuts(g):
        assert c.value == 1
        assert c.max_side == {c.source}


def test_two_terminals_single_edge():
    g = Graph.from_edges(2, [(0, 1, 4)], [0, 1])
    assert [c.value for c in isolating_cuts(g)] == [4, 4]


class _Cut:
    def __init__(self, value):
        self.value = value


def test_bound_arithmetic():
    b = compute_bounds([_Cut(3), _Cut(2), _Cut(2)], 0)
    assert (b.lower, b.upper) == (4, 4)
    b = compute_bounds([_Cut(5), _Cut(5), _Cut(5)], 0)
    assert (b.lower, b.upper) == (8, 10)
    b = compute_bounds([_Cut(1), _Cut(1)], 3)
    assert (b.lower, b.upper) == (4, 4)


def test_gex_bounds_close(g_ex):
    b = compute_bounds(isolating_cuts(g_ex), 0, g_ex)
    assert b.lower == b.upper == 4 == oracle_weight(g_ex)
    assert g_ex.cut_weight(b.witness) == 4


def test_executor_gives_same_cuts(g_ex):
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(2) as ex:
        assert isolating_cuts(g_ex, ex) == isolating_cuts(g_ex)


@st.composite
def small_graphs(draw):
    n = draw(st.integers(3, 8))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, 6)),
                          max_size=16))
    g = Graph(n)
    for u, v, w in edges:
        if u != v:
            g.add_edge(u, v, w)
    k = draw(st.integers(2, min(4, n)))
    g.set_terminals(draw(st.permutations(range(n)))[:k])
    return g


@settings(max_examples=150, deadline=None)
@given(small_graphs())
def test_min_cut_sides_against_enumeration(g):
    s, sinks = g.terminals[0], set(g.terminals[1:])
    c = min_s_T_cut(g, s, sinks)
    best, sides = all_optimal_sides(g, s, sinks)
    assert c.value == best
    assert c.min_side in [frozenset(x) for x in sides]
    assert c.max_side in [frozenset(x) for x in sides]
    for side in sides:
        assert c.min_side <= side <= c.max_side


@settings(max_examples=150, deadline=None)
@given(small_graphs())
def test_bounds_sandwich_optimum(g):
    opt = oracle_weight(g)
    cuts = isolating_cuts(g)
    b = compute_bounds(cuts, 0, g)
    assert b.lower <= opt <= b.upper
    assert g.cut_weight(b.witness) == b.upper
    for i, t in enumerate(g.terminals):
        assert b.witness[t] == i
    # minimal sides of distinct terminals never overlap
    for a, c in itertools.combinations(cuts, 2):
        assert not a.min_side & c.min_side


def test_capforest_tree_is_exact():
    g = Graph.from_edges(6, [(0, 1, 4), (1, 2, 1), (1, 3, 7), (3, 4, 2), (3, 5, 5)])
    gamma = capforest(g)
    assert gamma == {(min(u, v), max(u, v)): w for u, v, w in g.edges()}


def test_capforest_unit_triangle():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    gamma = capforest(g)
    assert max(gamma.values()) == 2
    assert all(gamma[e] <= 2 for e in gamma)


def test_capforest_below_connectivity_on_random_graphs():
    rng = random.Random(5)
    for seed in range(40):
        g = generate_random_graph(rng.randint(3, 10), rng.choice([2, 3, 4]), 6, seed)
        for (u, v), gam in capforest(g).items():
            assert gam <= scipy_lambda(g, u, v)
