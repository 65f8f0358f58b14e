import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from mtcut.graph import Graph
from mtcut.instances import random_instance
from mtcut.oracle import OracleRefused, brute_force, oracle_weight


def naive(g):
    free = sorted(v for v in g.adj if not g.is_terminal(v))
    best = None
    for combo in itertools.product(range(g.k), repeat=len(free)):
        block = {t: i for i, t in enumerate(g.terminals)}
        block.update(zip(free, combo))
        w = g.cut_weight(block)
        best = w if best is None else min(best, w)
    return best


def test_gex_hand_sum(g_ex):
    r = brute_force(g_ex)
    assert r.weight == 4
    assert r.count == 9
    assert r.n_optimal == 2
    # a joins t1; b joins t1 or t3
    assert {(a[3], a[4]) for a in r.assignments} == {(0, 0), (0, 2)}
    assert r.assignment == {0: 0, 1: 1, 2: 2, 3: 0, 4: 0}


def test_three_terminal_triangle():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], [0, 1, 2])
    assert oracle_weight(g) == 3


def test_star_center_joins_a_leaf():
    g = Graph.from_edges(4, [(3, 0, 1), (3, 1, 1), (3, 2, 1)], [0, 1, 2])
    r = brute_force(g)
    assert r.weight == 2 and r.n_optimal == 3


def test_refuses_past_cap(g_ex):
    with pytest.raises(OracleRefused):
        brute_force(g_ex, cap=8)


def test_keep_limits_stored_optima():
    g = Graph.from_edges(6, [(3, 0, 1), (4, 1, 1), (5, 2, 1)], [0, 1, 2])
    r = brute_force(g, keep=2)
    assert r.weight == 0 and r.n_optimal == 1
    g = Graph(6)
    g.set_terminals([0, 1, 2])
    r = brute_force(g, keep=5)
    assert r.n_optimal == 27 and len(r.assignments) == 5


def test_matches_naive_across_chunks():
    g = random_instance(14, 3, 3, 5, 11)
    assert 3 ** 11 > 1 << 16
    assert oracle_weight(g) == naive(g)


def test_matches_naive_on_batch():
    for seed in range(30):
        rng = random.Random(seed)
        g = random_instance(rng.randint(4, 8), rng.choice([2, 3]), rng.choice([2, 3]), 5, seed)
        assert oracle_weight(g) == naive(g)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.randoms(use_true_random=False))
def test_invariant_under_relabeling_and_scaling(seed, c, rnd):
    g = random_instance(8, 3, 3, 5, seed)
    base = brute_force(g, keep=10**6)
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = Graph(g.n)
    for u, v, w in g.edges():
        h.add_edge(perm[u], perm[v], w * c)
    h.set_terminals(perm[t] for t in g.terminals)
    moved = brute_force(h, keep=10**6)
    assert moved.weight == c * base.weight
    assert moved.n_optimal == base.n_optimal
    back = {tuple(sorted((v, a[perm[v]]) for v in g.adj)) for a in moved.assignments}
    assert back == {tuple(sorted(a.items())) for a in base.assignments}
