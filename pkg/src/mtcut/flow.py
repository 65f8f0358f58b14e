"""Minimum s-T-cuts, isolating cuts, cut bounds and CAPFOREST connectivity bounds."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .graph import Graph


@dataclass(frozen=True)
class STCut:
    source: int
    value: int
    min_side: frozenset[int]
    max_side: frozenset[int]
    terminal: int = -1  # terminal index of ``source`` when known


@dataclass
class BoundPair:
    lower: int
    upper: int
    # current vertex -> terminal index, realizing ``upper``
    witness: Optional[dict[int, int]] = field(default=None, repr=False)


class _FlowNetwork:
    """Residual network over compact ids with paired arcs (reverse = a ^ 1)."""

    def __init__(self, size: int):
        self.size = size
        self.out: list[list[int]] = [[] for _ in range(size)]
        self.head: list[int] = []
        self.cap: list[int] = []

    def add_arc_pair(self, u: int, v: int, c_uv: int, c_vu: int) -> None:
        a = len(self.head)
        self.head += (v, u)
        self.cap += (c_uv, c_vu)
        self.out[u].append(a)
        self.out[v].append(a + 1)

    def push_relabel(self, s: int, t: int) -> int:
        """FIFO push-relabel with the gap heuristic; leaves a maximum flow
        (not just a preflow) in the residual capacities."""
        N = self.size
        head, cap, out = self.head, self.cap, self.out
        height = [0] * N
        excess = [0] * N
        count = [0] * (2 * N + 2)
        count[0] = N - 1
        height[s] = N
        count[N] = 1
        current = [0] * N
        queue: deque[int] = deque()

        for a in out[s]:
            c = cap[a]
            if c > 0:
                v = head[a]
                cap[a] = 0
                cap[a ^ 1] += c
                if excess[v] == 0 and v != t and v != s:
                    queue.append(v)
                excess[v] += c

        while queue:
            u = queue.popleft()
            arcs = out[u]
            while excess[u] > 0:
                i = current[u]
                if i == len(arcs):
                    # relabel
                    old = height[u]
                    best = 2 * N
                    for a in arcs:
                        if cap[a] > 0:
                            hv = height[head[a]]
                            if hv < best:
                                best = hv
                    new = best + 1
                    count[old] -= 1
                    if old < N and count[old] == 0:
                        # gap: everything strictly between old and N is cut off from t
                        for x in range(N):
                            hx = height[x]
                            if old < hx < N:
                                count[hx] -= 1
                                height[x] = N + 1
                                count[N + 1] += 1
                                current[x] = 0
                        if new < N + 1:
                            new = N + 1
                    height[u] = new
                    count[new] += 1
                    current[u] = 0
                    continue
                a = arcs[i]
                v = head[a]
                if cap[a] > 0 and height[u] == height[v] + 1:
                    d = excess[u] if excess[u] < cap[a] else cap[a]
                    cap[a] -= d
                    cap[a ^ 1] += d
                    excess[u] -= d
                    if excess[v] == 0 and v != s and v != t:
                        queue.append(v)
                    excess[v] += d
                else:
                    current[u] = i + 1
        return excess[t]

    def reachable_from(self, s: int) -> set[int]:
        seen = {s}
        todo = [s]
        while todo:
            x = todo.pop()
            for a in self.out[x]:
                if self.cap[a] > 0:
                    y = self.head[a]
                    if y not in seen:
                        seen.add(y)
                        todo.append(y)
        return seen

    def reaching(self, t: int) -> set[int]:
        seen = {t}
        todo = [t]
        while todo:
            x = todo.pop()
            for a in self.out[x]:
                if self.cap[a ^ 1] > 0:
                    y = self.head[a]
                    if y not in seen:
                        seen.add(y)
                        todo.append(y)
        return seen


def min_s_T_cut(g: Graph, s: int, sinks: Iterable[int]) -> STCut:
    """Minimum cut separating ``s`` from every vertex in ``sinks``.

    The sinks are tied to a super-sink by arcs heavier than any finite cut.
    ``min_side`` is what ``s`` still reaches in the residual network and
    ``max_side`` is everything that cannot reach the super-sink.
    """
    sinks = [x for x in sinks if x != s]
    order = list(g.adj)
    index = {v: i for i, v in enumerate(order)}
    n = len(order)
    net = _FlowNetwork(n + 1)
    for u, v, w in g.edges():
        net.add_arc_pair(index[u], index[v], w, w)
    big = g.total_weight() + 1
    super_sink = n
    for x in sinks:
        net.add_arc_pair(index[x], super_sink, big, 0)
    src = index[s]
    value = net.push_relabel(src, super_sink) if sinks else 0
    min_side = frozenset(order[i] for i in net.reachable_from(src) if i != super_sink)
    reach_t = net.reaching(super_sink)
    max_side = frozenset(order[i] for i in range(n) if i not in reach_t)
    return STCut(s, value, min_side, max_side, g.terminal_index.get(s, -1))


def isolating_cuts(g: Graph, executor=None) -> list[STCut]:
    """One minimum isolating cut per active terminal, all on the same graph.

    With an ``executor`` (anything with a ``map`` method) the flow problems
    are distributed over its workers.
    """
    active = [g.terminals[i] for i in g.active_terminals()]

    def one(t: int) -> STCut:
        return min_s_T_cut(g, t, active)

    if executor is not None and len(active) > 1:
        return list(executor.map(one, active))
    return [one(t) for t in active]


def compute_bounds(cuts: list[STCut], deleted: int, graph: Optional[Graph] = None) -> BoundPair:
    """Bounds from isolating cut values.

    upper = deleted + sum - max, lower = deleted + ceil(sum / 2).  Given the
    graph, the witness puts the minimal sides of all but the heaviest cut in
    their own blocks and everything else with the heaviest terminal; the
    upper bound is then tightened to the witness' actual weight (shared
    boundary edges between two small sides are counted once, not twice).
    """
    values = [c.value for c in cuts]
    total = sum(values)
    upper = deleted + total - max(values, default=0)
    lower = deleted + (total + 1) // 2
    if graph is None:
        return BoundPair(lower, upper)
    witness = isolating_witness(graph, cuts)
    upper = min(upper, deleted + graph.cut_weight(witness))
    return BoundPair(lower, upper, witness)


def isolating_witness(g: Graph, cuts: list[STCut]) -> dict[int, int]:
    """Multiterminal cut from the k-1 lightest isolating cuts."""
    if g.k == 0:
        return {}
    if cuts:
        heavy = max(cuts, key=lambda c: (c.value, -c.terminal))
        rest = g.terminal_index[heavy.source]
    else:
        rest = 0
    witness = dict.fromkeys(g.adj, rest)
    for c in cuts:
        if c.source != g.terminals[rest]:
            ti = g.terminal_index[c.source]
            for v in c.min_side:
                witness[v] = ti
    for i, t in enumerate(g.terminals):
        witness[t] = i
    return witness


def capforest(g: Graph) -> dict[tuple[int, int], int]:
    """Lower bound on the pairwise connectivity of every edge's endpoints.

    Maximum-adjacency scan: repeatedly visit the unvisited vertex with the
    largest attachment ``r`` to the visited ones; scanning edge ``(x, y)``
    raises ``r(y)`` by ``w`` and certifies ``r(y)`` as a bound for ``(x, y)``.
    Keys are ``(min(u, v), max(u, v))``.
    """
    gamma: dict[tuple[int, int], int] = {}
    r = dict.fromkeys(g.adj, 0)
    visited: set[int] = set()
    heap: list[tuple[int, int]] = []
    for start in sorted(g.adj):
        if start in visited:
            continue
        heapq.heappush(heap, (0, start))
        while heap:
            neg, x = heapq.heappop(heap)
            if x in visited or -neg != r[x]:
                continue
            visited.add(x)
            for y, w in g.adj[x].items():
                if y in visited:
                    continue
                r[y] += w
                gamma[(x, y) if x < y else (y, x)] = r[y]
                heapq.heappush(heap, (-r[y], y))
    return gamma
