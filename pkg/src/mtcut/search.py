"""Branch and reduce for multiterminal cut.

Components with fewer than three terminals are solved directly; every other
component runs a best-first search over problems that are kernelized when
created, pruned by the global upper bound and split on one edge into a
contracted and a deleted child.  With several threads each worker owns a
queue; new problems go to a shortest queue, preferring the worker's own.
"""
from __future__ import annotations

import heapq
import logging
import math
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .flow import min_s_T_cut
from .graph import Graph, connected_components
from .kernel import ReductionConfig, ReductionLog, kernelize
from .problem import Problem

log = logging.getLogger(__name__)

EDGE_SELECTIONS = ("HeavyEdge", "HeavyVertex", "Connection", "NonTerminalWeight", "HeavyGlobal")
QUEUE_ORDERS = ("LowerBound", "UpperBound", "BoundSum", "BiggerDistance", "LowerDistance",
                "MostDeleted", "SmallerGraph", "FewTerminals")


class ResourceLimitError(RuntimeError):
    """The problem queue outgrew its budget; ``result`` holds the best cut found."""

    def __init__(self, msg: str, result: "CutResult"):
        super().__init__(msg)
        self.result = result


class BranchingError(AssertionError):
    """A terminal-incident branch failed to raise a child's lower bound."""


@dataclass
class SearchConfig:
    edge_selection: str = "HeavyVertex"
    queue_order: str = "LowerBound"
    reductions: ReductionConfig = field(default_factory=ReductionConfig)
    threads: int = 1
    time_limit: Optional[float] = None  # seconds
    seed: int = 0
    max_queue: Optional[int] = None  # pending problems allowed before giving up
    check_branching: bool = False  # verify the lower-bound increase of every branch

    def __post_init__(self):
        if self.edge_selection not in EDGE_SELECTIONS:
            raise ValueError(f"unknown edge selection {self.edge_selection!r}")
        if self.queue_order not in QUEUE_ORDERS:
            raise ValueError(f"unknown queue order {self.queue_order!r}")
        if self.threads < 1:
            raise ValueError("threads must be positive")


@dataclass
class CutResult:
    weight: int
    assignment: dict[int, int]  # original vertex id -> terminal index
    optimal: bool
    explored: int = 0
    branches: int = 0
    reductions: ReductionLog = field(default_factory=ReductionLog)
    kernel_n: int = 0
    kernel_m: int = 0
    root_lower: int = 0
    root_upper: float = 0
    wall_time: float = 0.0


# -- edge selection ------------------------------------------------------

def _heaviest_terminal_link(g: Graph, x: int) -> tuple[int, int]:
    t = max((y for y in g.adj[x] if g.is_terminal(y)), key=lambda y: (g.adj[x][y], -y))
    return t, x


def select_branch_edge(g: Graph, strategy: str = "HeavyVertex") -> Optional[tuple[int, int]]:
    """Edge to branch on, or ``None`` when no candidate exists.

    Terminal strategies return ``(terminal, vertex)``.  Ties go to the
    smallest vertex id, then the smallest edge.
    """
    if strategy == "HeavyGlobal":
        best = None
        for u, v, w in g.edges():
            key = (-w, u, v)
            if best is None or key < best:
                best = key
        if best is None:
            return None
        _, u, v = best
        return (v, u) if g.is_terminal(v) and not g.is_terminal(u) else (u, v)

    if strategy == "HeavyEdge":
        best = None
        for t in g.terminals:
            for x, w in g.adj[t].items():
                if g.is_terminal(x):
                    continue
                key = (-w, min(t, x), max(t, x))
                if best is None or key < best:
                    best, edge = key, (t, x)
        return None if best is None else edge

    # vertex-scoring strategies over the terminals' neighbourhood
    scores: dict[int, int] = {}
    for t in g.terminals:
        for x, w in g.adj[t].items():
            if g.is_terminal(x):
                continue
            if strategy == "HeavyVertex":
                s = w + g.degree[x]
                if s > scores.get(x, -1):
                    scores[x] = s
            elif strategy == "Connection":
                scores[x] = scores.get(x, 0) + w
            elif strategy == "NonTerminalWeight":
                scores[x] = 0
            else:
                raise ValueError(f"unknown edge selection {strategy!r}")
    if not scores:
        return None
    if strategy == "NonTerminalWeight":
        for x in scores:
            scores[x] = sum(w for y, w in g.adj[x].items() if not g.is_terminal(y))
    x = min(scores, key=lambda v: (-scores[v], v))
    return _heaviest_terminal_link(g, x)


# -- problem order -------------------------------------------------------

def problem_key(p: Problem, order: str) -> tuple:
    """Heap key: smaller is examined first; creation order breaks every tie."""
    lo, up = p.lower, p.upper
    if order == "LowerBound":
        return (lo, up, p.seq)
    if order == "UpperBound":
        return (up, lo, p.seq)
    if order == "BoundSum":
        return (lo + up, p.seq)
    if order == "BiggerDistance":
        return (-(up - lo), p.seq)
    if order == "LowerDistance":
        return (up - lo, p.seq)
    if order == "MostDeleted":
        return (-p.deleted, p.seq)
    if order == "SmallerGraph":
        return (p.n, p.seq)
    if order == "FewTerminals":
        return (p.active, lo, up, p.seq)
    raise ValueError(f"unknown queue order {order!r}")


def compare_problems(p1: Problem, p2: Problem, order: str = "LowerBound") -> int:
    """-1 if ``p1`` is examined before ``p2``, 1 if after, 0 if tied."""
    a, b = problem_key(p1, order), problem_key(p2, order)
    return (a > b) - (a < b)


def push_problem(queues: list[list], p: Problem, rng: random.Random, local: int = 0,
                 key: Optional[tuple] = None) -> int:
    """Put ``p`` on a shortest queue (the local one if it is among them).

    Returns the index of the receiving queue.
    """
    sizes = [len(q) for q in queues]
    low = min(sizes)
    if sizes[local] == low:
        target = local
    else:
        target = rng.choice([i for i, s in enumerate(sizes) if s == low])
    heapq.heappush(queues[target], (key if key is not None else (p.seq,), p.seq, p))
    return target


# -- branching -----------------------------------------------------------

def branch(p: Problem, edge: tuple[int, int], next_seq: Callable[[], int]) -> tuple[Problem, Problem]:
    """Split on ``edge``: the first child contracts it, the second deletes it.

    The parent's graph is handed to the deleting child.  Children inherit
    the parent's lower bound until they are kernelized.
    """
    u, v = edge
    g_contract = p.graph.copy()
    g_contract.contract_edge(u, v)
    g_delete = p.graph
    w = g_delete.delete_edge(u, v)
    return (p.spawn(g_contract, p.deleted, next_seq()),
            p.spawn(g_delete, p.deleted + w, next_seq()))


# -- search --------------------------------------------------------------

class _Search:
    def __init__(self, g: Graph, cfg: SearchConfig, deadline: Optional[float]):
        self.base = g
        self.cfg = cfg
        self.deadline = deadline
        self.lock = threading.Condition()
        self.best_weight: float = math.inf
        self.best: Optional[dict[int, int]] = None
        self.rng = random.Random(cfg.seed)
        self.queues: list[list] = [[] for _ in range(cfg.threads)]
        self.pending = 0  # queued plus in-process problems
        self.seq = 0
        self.explored = 0
        self.branches = 0
        self.log = ReductionLog()
        self.timed_out = False
        self.overflow = False
        self.error: Optional[BaseException] = None

    def next_seq(self) -> int:
        with self.lock:
            self.seq += 1
            return self.seq

    def weight_of(self, lifted: dict[int, int]) -> int:
        g = self.base
        block = {v: lifted[g.members[v][0]] for v in g.adj}
        return g.cut_weight(block)

    def publish(self, p: Problem) -> None:
        if p.witness is None or p.upper >= self.best_weight:
            return
        w = self.weight_of(p.witness)
        with self.lock:
            if w < self.best_weight:
                self.best_weight = w
                self.best = p.witness

    def reduce(self, p: Problem, executor=None) -> None:
        _, rlog = kernelize(p, self.cfg.reductions, upper=self.best_weight, executor=executor)
        self.publish(p)
        with self.lock:
            self.explored += 1
            self.log.merge(rlog)

    def expand(self, p: Problem, worker: int) -> None:
        if p.dead or p.lower >= self.best_weight:
            return
        edge = select_branch_edge(p.graph, self.cfg.edge_selection)
        if edge is None:
            raise AssertionError("open problem without a branching edge")
        terminal_edge = p.graph.is_terminal(edge[0]) or p.graph.is_terminal(edge[1])
        parent_raw = p.raw_lower2
        with self.lock:
            self.branches += 1
        for child in branch(p, edge, self.next_seq):
            self.reduce(child)
            if self.cfg.check_branching and terminal_edge and not child.dead \
                    and not child.closed and child.raw_lower2 <= parent_raw:
                raise BranchingError(
                    f"branch on {edge} left lower bound at {child.raw_lower2 / 2} (parent {parent_raw / 2})")
            if child.dead or child.lower >= self.best_weight:
                continue
            with self.lock:
                push_problem(self.queues, child, self.rng, worker,
                             problem_key(child, self.cfg.queue_order))
                self.pending += 1
                if self.cfg.max_queue is not None and \
                        sum(len(q) for q in self.queues) > self.cfg.max_queue:
                    self.overflow = True
                self.lock.notify_all()

    def worker(self, idx: int) -> None:
        while True:
            with self.lock:
                while True:
                    if self.error or self.timed_out or self.overflow:
                        return
                    if self.deadline is not None and time.monotonic() > self.deadline:
                        self.timed_out = True
                        self.lock.notify_all()
                        return
                    if self.queues[idx]:
                        _, _, p = heapq.heappop(self.queues[idx])
                        break
                    if self.pending == 0:
                        self.lock.notify_all()
                        return
                    self.lock.wait(0.05)
            try:
                self.expand(p, idx)
            except BaseException as exc:  # surfaced by run()
                with self.lock:
                    self.error = exc
                    self.lock.notify_all()
                return
            finally:
                with self.lock:
                    self.pending -= 1
                    self.lock.notify_all()

    def run(self) -> None:
        root = Problem(self.base.copy())
        if self.cfg.threads > 1:
            with ThreadPoolExecutor(self.cfg.threads) as pool:
                self.reduce(root, executor=pool)
        else:
            self.reduce(root)
        self.kernel_size = (root.graph.n, root.graph.m)
        self.root_bounds = (root.lower, root.upper)
        if not root.dead and root.lower < self.best_weight:
            heapq.heappush(self.queues[0], (problem_key(root, self.cfg.queue_order), root.seq, root))
            self.pending = 1
            if self.cfg.threads == 1:
                self.worker(0)
            else:
                workers = [threading.Thread(target=self.worker, args=(i,), daemon=True)
                           for i in range(self.cfg.threads)]
                for t in workers:
                    t.start()
                for t in workers:
                    t.join()
        if self.error is not None:
            raise self.error


def solve(g: Graph, cfg: Optional[SearchConfig] = None) -> CutResult:
    """Minimum multiterminal cut of ``g`` (terminal ``i`` owns block ``i``).

    The assignment covers every original vertex id represented in ``g``.
    On time-out the best cut found is returned with ``optimal=False``; when
    the queue budget is exceeded :class:`ResourceLimitError` carries it.
    """
    cfg = cfg or SearchConfig()
    start = time.monotonic()
    deadline = start + cfg.time_limit if cfg.time_limit is not None else None
    if g.k == 0:
        raise ValueError("at least one terminal is required")
    result = CutResult(0, {x: 0 for x in g.loose}, True)
    result.kernel_n, result.kernel_m = 0, 0
    overflow = False
    for comp in connected_components(g):
        if comp.kind in ("empty", "single"):
            block = comp.terminals[0] if comp.terminals else 0
            for v in comp.vertices:
                for x in g.members[v]:
                    result.assignment[x] = block
            result.kernel_n += 1 if comp.terminals else 0
            continue
        sub = g.subgraph(comp.vertices)
        if comp.kind == "pair":
            s, t = sub.terminals
            cut = min_s_T_cut(sub, s, [t])
            result.weight += cut.value
            for v in comp.vertices:
                b = comp.terminals[0] if v in cut.min_side else comp.terminals[1]
                for x in g.members[v]:
                    result.assignment[x] = b
            result.kernel_n += 2
            result.kernel_m += 1 if cut.value else 0
            continue
        search = _Search(sub, cfg, deadline)
        search.run()
        result.explored += search.explored
        result.branches += search.branches
        result.reductions.merge(search.log)
        result.kernel_n += search.kernel_size[0]
        result.kernel_m += search.kernel_size[1]
        result.root_lower += search.root_bounds[0]
        result.root_upper += search.root_bounds[1]
        result.weight += search.best_weight
        for x, b in search.best.items():
            result.assignment[x] = comp.terminals[b]
        if search.timed_out:
            result.optimal = False
        if search.overflow:
            overflow = True
    result.wall_time = time.monotonic() - start
    if overflow:
        result.optimal = False
        raise ResourceLimitError("problem queue exceeded its budget", result)
    return result
