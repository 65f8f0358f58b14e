"""Exact minimum multiterminal cut by branch and reduce."""
from .flow import capforest, compute_bounds, isolating_cuts, min_s_T_cut
from .graph import Graph, GraphError, UnionFind, connected_components
from .ilp import build_ilp, evaluate_assignment, kernel_ilp, read_lp, write_lp
from .instances import ParseError, generate_random_graph, make_terminals, random_instance, read_graph, write_graph
from .kernel import ReductionConfig, ReductionLog, kernelize
from .oracle import OracleRefused, brute_force, oracle_weight
from .problem import Problem
from .search import CutResult, SearchConfig, solve

__all__ = [
    "Graph", "GraphError", "UnionFind", "connected_components",
    "min_s_T_cut", "isolating_cuts", "compute_bounds", "capforest",
    "Problem", "ReductionConfig", "ReductionLog", "kernelize",
    "SearchConfig", "CutResult", "solve",
    "build_ilp", "write_lp", "read_lp", "kernel_ilp", "evaluate_assignment",
    "brute_force", "oracle_weight", "OracleRefused",
    "read_graph", "write_graph", "make_terminals", "generate_random_graph", "random_instance", "ParseError",
]
