import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from mtcut.graph import Graph
from mtcut.instances import random_instance
from mtcut.kernel import (GROUPS, RULES, ReductionConfig, ReductionLog, apply_rule, contract_isolating_cuts,
                          delete_terminal_edges, high_connectivity_marks, high_marks, kernelize, low_marks,
                          triangle_marks)
from mtcut.oracle import oracle_weight
from mtcut.problem import Problem

from conftest import small_instance, small_optimum


def fresh(g):
    return Problem(g.copy())


def test_isolating_contraction_on_gex(g_ex):
    p = contract_isolating_cuts(fresh(g_ex))
    assert p.graph.n == 4
    assert 3 not in p.graph.adj and 3 in p.graph.members[0]
    assert oracle_weight(p.graph) + p.deleted == 4


def test_isolating_contraction_identity_and_fixed_point():
    star = Graph.from_edges(4, [(3, 0, 1), (3, 1, 1), (3, 2, 1)], [0, 1, 2])
    p = contract_isolating_cuts(fresh(star))
    assert p.graph.adj == star.adj
    g = random_instance(12, 3, 3, 5, 4)
    p = contract_isolating_cuts(Problem(g))
    before = p.graph.copy()
    contract_isolating_cuts(p)
    assert p.graph.adj == before.adj


def test_terminal_edge_deletion():
    g = Graph.from_edges(4, [(0, 1, 7), (1, 2, 1), (2, 3, 2), (0, 3, 1)], [0, 1])
    p = fresh(g)
    assert delete_terminal_edges(p) == 7
    assert p.deleted == 7 and not p.graph.has_edge(0, 1)
    g = Graph.from_edges(3, [(0, 2, 1), (1, 2, 1)], [0, 1])
    p = fresh(g)
    assert delete_terminal_edges(p) == 0 and p.graph.adj == g.adj


def test_terminal_triangle_is_all_deleted():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], [0, 1, 2])
    p = fresh(g)
    delete_terminal_edges(p)
    assert p.deleted == 3 == oracle_weight(g) and p.graph.m == 0


def test_degree_one_and_two():
    g = Graph.from_edges(2, [(0, 1, 5)], [0])
    assert low_marks(g)[0] == [(1, 0, "DegreeOne")]
    g = Graph.from_edges(3, [(0, 2, 3), (1, 2, 2)], [0, 1])
    assert low_marks(g)[0] == [(2, 0, "DegreeTwo")]
    g = Graph.from_edges(3, [(0, 2, 2), (1, 2, 2)], [0, 1])
    assert low_marks(g)[0] == [(2, 0, "DegreeTwo")]


def test_isolated_vertex_is_dropped():
    g = Graph.from_edges(3, [(0, 1, 1)], [0, 1])
    assert low_marks(g)[1] == [2]
    p = fresh(g)
    log = apply_rule(p, "low")
    assert log.counts["IsolatedVertex"] == 1 and 2 not in p.graph.adj and p.graph.loose == (2,)


def test_heavy_edge():
    g = Graph.from_edges(4, [(0, 1, 5), (0, 2, 2), (0, 3, 2)])
    assert high_marks(g, [0]) == [(0, 1, "HeavyEdge")]


def test_semi_enclosed_boundary():
    # v = 3 with terminals 0, 1, 2 and non-terminal x = 4
    g = Graph.from_edges(5, [(3, 0, 5), (3, 1, 2), (3, 4, 2)], [0, 1, 2])
    assert high_marks(g, [3]) == [(3, 0, "HeavyEdge")]  # 10 >= 9 already
    g = Graph.from_edges(5, [(3, 0, 5), (3, 1, 2), (3, 2, 2), (3, 4, 2)], [0, 1, 2])
    assert high_marks(g, [3]) == [(3, 0, "SemiEnclosed")]  # 5 > 2 + 2
    g = Graph.from_edges(5, [(3, 0, 4), (3, 1, 2), (3, 2, 1), (3, 4, 2)], [0, 1, 2])
    assert high_marks(g, [3]) == []  # 4 is not > 2 + 2


def test_triangle_rule():
    unit = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], [2])
    assert triangle_marks(unit) == [(0, 1, "HeavyTriangle")]
    g = Graph.from_edges(4, [(0, 1, 1), (1, 2, 1), (0, 2, 2), (0, 3, 10)], [2])
    assert triangle_marks(g, [0]) == []


def test_triangle_extra_clause_counterexample():
    # the half-degree test alone would merge 3 and 4, raising the optimum from 3 to 4
    g = Graph.from_edges(6, [(3, 4, 1), (3, 5, 1), (4, 5, 1), (3, 0, 2), (4, 1, 2), (5, 2, 10)], [0, 1, 2])
    assert oracle_weight(g) == 3
    merged = g.copy()
    merged.contract_edge(3, 4)
    assert oracle_weight(merged) == 4
    assert (3, 4, "HeavyTriangle") not in triangle_marks(g)
    p = fresh(g)
    apply_rule(p, "triangle")
    assert oracle_weight(p.graph) + p.deleted == 3


def test_high_connectivity_on_clique():
    # 5-clique of weight-3 edges hanging off three terminals by unit edges
    edges = [(i, j, 3) for i in range(3, 8) for j in range(i + 1, 8)] + [(0, 3, 1), (1, 4, 1), (2, 5, 1)]
    g = Graph.from_edges(8, edges, [0, 1, 2])
    assert oracle_weight(g) == 2
    p = fresh(g)
    log = apply_rule(p, "highconn")
    assert log.counts["HighConnectivity"] == 4
    assert p.graph.n == 4
    assert oracle_weight(p.graph) + p.deleted == 2


def test_high_connectivity_thresholds():
    g = Graph.from_edges(3, [(0, 2, 3), (1, 2, 3)], [0, 1])
    gamma = {(0, 2): 3, (1, 2): 3}
    # two terminals: plain gamma > bound
    assert high_connectivity_marks(g, [3, 3], 2, gamma) == [(0, 2, "HighConnectivity"), (1, 2, "HighConnectivity")]
    assert high_connectivity_marks(g, [3, 3], 3, gamma) == []
    assert high_connectivity_marks(g, [3, 3], math.inf, gamma) == []
    assert high_connectivity_marks(g, [3, 3, 4], 4, gamma) == []
    # extra terminals lower the threshold by a quarter of their cut values
    assert high_connectivity_marks(g, [5, 6, 6], 4, gamma) == [(0, 2, "HighConnectivity"), (1, 2, "HighConnectivity")]


def test_kernelize_closes_gex(g_ex):
    p, log = kernelize(fresh(g_ex))
    assert p.lower == p.upper == 4
    assert p.deleted == 1 and p.graph.n == 4
    assert log.counts["IsolatingCutContraction"] == 1 and log.counts["TerminalEdgeDeletion"] == 1
    assert g_ex.cut_weight({v: p.witness[v] for v in g_ex.adj}) == 4


def test_degree_two_cascade_collapses_path():
    # t1 - a - b - c - t2 with t3 hanging off b by a light edge
    g = Graph.from_edges(6, [(0, 3, 5), (3, 4, 4), (4, 5, 6), (5, 1, 3), (4, 2, 1)], [0, 1, 2])
    p = fresh(g)
    apply_rule(p, "low")
    assert p.graph.n == 4
    assert oracle_weight(p.graph) + p.deleted == oracle_weight(g)


def test_disabled_groups_only_run_always_on_steps():
    g = small_instance(17)
    p, log = kernelize(Problem(g.copy()), ReductionConfig.none(), stop_when_closed=False)
    for r in RULES:
        if r not in ("IsolatingCutContraction", "TerminalEdgeDeletion"):
            assert log.counts[r] == 0


def test_config_parsing():
    assert str(ReductionConfig.parse("all")) == ",".join(GROUPS)
    assert str(ReductionConfig.parse("none")) == "none"
    assert ReductionConfig.parse("low,highconn") == ReductionConfig(True, False, False, True)
    with pytest.raises(ValueError):
        ReductionConfig.parse("low,medium")


def test_log_merge():
    a, b = ReductionLog(), ReductionLog()
    a.counts["DegreeOne"] += 2
    b.counts["DegreeOne"] += 1
    b.deleted_weight = 4
    a.merge(b)
    assert a.as_dict()["DegreeOne"] == 3 and a.as_dict()["deleted_weight"] == 4


@pytest.mark.parametrize("group", GROUPS)
def test_each_group_is_safe_on_batch(group):
    for seed in range(120):
        g = small_instance(seed)
        p = Problem(g.copy())
        apply_rule(p, group)
        assert oracle_weight(p.graph) + p.deleted == small_optimum(seed), seed


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(6, 11), st.sampled_from([3, 4]), st.sampled_from([2, 3, 4, 5]))
def test_full_kernel_preserves_optimum(seed, n, k, d):
    g = random_instance(n, k, d, 5, seed)
    opt = oracle_weight(g)
    p, _ = kernelize(Problem(g.copy()), stop_when_closed=False)
    assert oracle_weight(p.graph) + p.deleted == opt
    assert p.lower <= opt <= p.upper
    assert g.cut_weight(p.witness) == p.upper
    # every original vertex is still accounted for
    assert sorted(p.graph.original_ids()) == sorted(g.adj)
