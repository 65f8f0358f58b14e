"""Mutable weighted undirected graph with contraction, deletion and terminals.

Vertices are integer ids that stay stable for the lifetime of the graph; a
contraction keeps one of the two ids (always the terminal, if there is one)
and retires the other.  Every live vertex carries the tuple of original
vertex ids it stands for, so a partition of the current graph can always be
lifted back to the input graph.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator


class GraphError(ValueError):
    """Raised when an operation would break a graph invariant."""


class Graph:
    def __init__(self, n: int = 0):
        self.adj: dict[int, dict[int, int]] = {v: {} for v in range(n)}
        self.degree: dict[int, int] = {v: 0 for v in range(n)}
        self.members: dict[int, tuple[int, ...]] = {v: (v,) for v in range(n)}
        # terminal index -> current vertex id
        self.terminals: list[int] = []
        self.terminal_index: dict[int, int] = {}
        # original ids of non-terminal vertices dropped as isolated
        self.loose: tuple[int, ...] = ()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, int]],
                   terminals: Iterable[int] = ()) -> "Graph":
        g = cls(n)
        for u, v, w in edges:
            g.add_edge(u, v, w)
        g.set_terminals(terminals)
        return g

    # -- basic queries -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.adj)

    @property
    def m(self) -> int:
        return sum(len(nb) for nb in self.adj.values()) // 2

    def vertices(self) -> list[int]:
        return list(self.adj)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Each undirected edge once, as ``(u, v, w)`` with ``u < v``."""
        for u, nb in self.adj.items():
            for v, w in nb.items():
                if u < v:
                    yield u, v, w

    def weight(self, u: int, v: int) -> int:
        return self.adj[u].get(v, 0)

    def has_edge(self, u: int, v: int) -> bool:
        return u in self.adj and v in self.adj[u]

    def total_weight(self) -> int:
        return sum(self.degree.values()) // 2

    def is_terminal(self, v: int) -> bool:
        return v in self.terminal_index

    @property
    def k(self) -> int:
        return len(self.terminals)

    def active_terminals(self) -> list[int]:
        """Terminal indices whose vertex still has incident edges."""
        return [i for i, t in enumerate(self.terminals) if self.adj[t]]

    # -- construction --------------------------------------------------

    def add_vertex(self) -> int:
        v = max(self.adj, default=-1) + 1
        self.adj[v] = {}
        self.degree[v] = 0
        self.members[v] = (v,)
        return v

    def add_edge(self, u: int, v: int, w: int) -> None:
        """Add weight ``w`` between ``u`` and ``v``; merges with an existing edge."""
        if u == v:
            raise GraphError(f"self-loop at {u}")
        if w <= 0:
            raise GraphError(f"edge ({u},{v}) has non-positive weight {w}")
        self.adj[u][v] = self.adj[u].get(v, 0) + w
        self.adj[v][u] = self.adj[v].get(u, 0) + w
        self.degree[u] += w
        self.degree[v] += w

    def set_terminals(self, terminals: Iterable[int]) -> None:
        terminals = list(terminals)
        if len(set(terminals)) != len(terminals):
            raise GraphError("terminal ids must be distinct")
        for t in terminals:
            if t not in self.adj:
                raise GraphError(f"terminal {t} is not a vertex")
        self.terminals = terminals
        self.terminal_index = {t: i for i, t in enumerate(terminals)}

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.adj = {v: dict(nb) for v, nb in self.adj.items()}
        g.degree = dict(self.degree)
        g.members = dict(self.members)
        g.terminals = list(self.terminals)
        g.terminal_index = dict(self.terminal_index)
        g.loose = self.loose
        return g

    def subgraph(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph keeping vertex ids, members and terminal order
        (terminals outside ``vertices`` are dropped)."""
        keep = set(vertices)
        g = Graph.__new__(Graph)
        g.adj = {v: {u: w for u, w in self.adj[v].items() if u in keep} for v in keep}
        g.degree = {v: sum(nb.values()) for v, nb in g.adj.items()}
        g.members = {v: self.members[v] for v in keep}
        g.loose = ()
        g.set_terminals(t for t in self.terminals if t in keep)
        return g

    # -- mutation ------------------------------------------------------

    def delete_edge(self, u: int, v: int) -> int:
        """Remove edge ``(u, v)`` and return its weight."""
        try:
            w = self.adj[u].pop(v)
        except KeyError:
            raise GraphError(f"no edge ({u},{v})") from None
        del self.adj[v][u]
        self.degree[u] -= w
        self.degree[v] -= w
        return w

    def remove_isolated(self, v: int) -> None:
        if self.adj[v]:
            raise GraphError(f"vertex {v} is not isolated")
        if self.is_terminal(v):
            raise GraphError("terminals are never removed")
        self.loose = self.loose + self.members.pop(v)
        del self.adj[v]
        del self.degree[v]

    def contract_edge(self, u: int, v: int) -> int:
        """Merge ``v`` into ``u`` and return the id of the merged vertex.

        Parallel edges are merged by summing weights and the connecting edge
        disappears.  If ``v`` is the terminal the merged vertex keeps ``v``'s id.
        """
        if not self.has_edge(u, v):
            raise GraphError(f"no edge ({u},{v})")
        return self._merge(u, v)

    def _merge(self, u: int, v: int) -> int:
        tu, tv = self.is_terminal(u), self.is_terminal(v)
        if tu and tv:
            raise GraphError(f"cannot merge terminals {u} and {v}")
        if tv:
            u, v = v, u
        nb_u, nb_v = self.adj[u], self.adj.pop(v)
        w_uv = nb_v.pop(u, 0)
        if w_uv:
            del nb_u[v]
        for x, w in nb_v.items():
            nb_x = self.adj[x]
            del nb_x[v]
            nb_x[u] = nb_x.get(u, 0) + w
            nb_u[x] = nb_u.get(x, 0) + w
        self.degree[u] += self.degree.pop(v) - 2 * w_uv
        self.members[u] = self.members[u] + self.members.pop(v)
        return u

    def contract_vertex_set(self, vertices: Iterable[int], check_connected: bool = True) -> int:
        """Merge a connected vertex set holding at most one terminal into one vertex."""
        group = list(dict.fromkeys(vertices))
        if not group:
            raise GraphError("empty vertex set")
        terms = [v for v in group if self.is_terminal(v)]
        if len(terms) > 1:
            raise GraphError(f"vertex set contains {len(terms)} terminals")
        if check_connected and not self._connected_within(group):
            raise GraphError("vertex set is not connected")
        target = terms[0] if terms else max(group, key=lambda x: (len(self.adj[x]), -x))
        for v in group:
            if v != target:
                target = self._merge(target, v)
        return target

    def _connected_within(self, group: list[int]) -> bool:
        inside = set(group)
        seen = {group[0]}
        todo = [group[0]]
        while todo:
            x = todo.pop()
            for y in self.adj[x]:
                if y in inside and y not in seen:
                    seen.add(y)
                    todo.append(y)
        return len(seen) == len(inside)

    def contract_groups(self, uf: "UnionFind") -> list[int]:
        """Apply every non-trivial union-find group as one contraction.

        Returns the ids of the merged vertices.
        """
        merged = []
        for group in uf.groups():
            if len(group) > 1:
                merged.append(self.contract_vertex_set(group, check_connected=False))
        return merged

    # -- partitions ----------------------------------------------------

    def component_of(self, s: int) -> set[int]:
        seen = {s}
        todo = deque([s])
        while todo:
            x = todo.popleft()
            for y in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    def cut_weight(self, block_of: dict[int, int]) -> int:
        """Weight of edges whose endpoints lie in different blocks."""
        return sum(w for u, v, w in self.edges() if block_of[u] != block_of[v])

    def lift(self, block_of: dict[int, int], loose_block: int = 0) -> dict[int, int]:
        """Map a block assignment of current vertices onto original vertex ids."""
        out = {}
        for v, b in block_of.items():
            for x in self.members[v]:
                out[x] = b
        for x in self.loose:
            out[x] = loose_block
        return out

    def original_ids(self) -> list[int]:
        ids = [x for mem in self.members.values() for x in mem]
        ids.extend(self.loose)
        return ids

    def relabeled(self) -> tuple["Graph", list[int]]:
        """Fresh graph on ``0..n-1`` (sorted by current id) plus the id map."""
        order = sorted(self.adj)
        index = {v: i for i, v in enumerate(order)}
        g = Graph(len(order))
        for u, v, w in self.edges():
            g.add_edge(index[u], index[v], w)
        g.set_terminals(index[t] for t in self.terminals)
        return g, order

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, k={self.k})"


class UnionFind:
    """Disjoint sets over arbitrary hashable ids, union by size."""

    def __init__(self, items: Iterable[int] = ()):
        self.parent: dict[int, int] = {x: x for x in items}
        self.size: dict[int, int] = {x: 1 for x in self.parent}

    def find(self, x: int) -> int:
        parent = self.parent
        if x not in parent:
            parent[x] = x
            self.size[x] = 1
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def same(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


@dataclass
class Component:
    vertices: list[int]
    terminals: list[int]  # terminal indices inside the component

    @property
    def kind(self) -> str:
        return {0: "empty", 1: "single", 2: "pair"}.get(len(self.terminals), "multi")


def connected_components(g: Graph) -> list[Component]:
    """Split ``g`` into components, classified by how many terminals they hold."""
    seen: set[int] = set()
    out = []
    for s in sorted(g.adj):
        if s in seen:
            continue
        comp = g.component_of(s)
        seen |= comp
        terms = sorted(g.terminal_index[v] for v in comp if v in g.terminal_index)
        out.append(Component(sorted(comp), terms))
    return out
