"""Data reductions for multiterminal cut, applied until nothing changes.

Every local rule is an exchange argument owned by one non-terminal vertex:
moving the owner into its partner's block never makes a cut heavier, no
matter where the other vertices sit.  A pass lets each vertex own at most
one mark, so the marks of one pass form a functional graph and can all be
honoured at once (settle partners before owners, break cycles anywhere).
HighConnectivity marks are not exchanges but facts that hold in every
cut lighter than the known bound, so any number of them combine.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .flow import STCut, capforest, compute_bounds, isolating_cuts
from .graph import Graph, UnionFind
from .problem import Problem

RULES = (
    "IsolatedVertex",
    "DegreeOne",
    "DegreeTwo",
    "HeavyEdge",
    "SemiEnclosed",
    "HeavyTriangle",
    "HighConnectivity",
    "IsolatingCutContraction",
    "TerminalEdgeDeletion",
)

GROUPS = ("low", "high", "triangle", "highconn")


@dataclass(frozen=True)
class ReductionConfig:
    low: bool = True
    high: bool = True
    triangle: bool = True
    highconn: bool = True

    @classmethod
    def none(cls) -> "ReductionConfig":
        return cls(False, False, False, False)

    @classmethod
    def parse(cls, text: str) -> "ReductionConfig":
        """``all``, ``none`` or a comma list out of low,high,triangle,highconn."""
        text = text.strip().lower()
        if text == "all":
            return cls()
        if text in ("none", ""):
            return cls.none()
        names = {s.strip() for s in text.split(",")}
        unknown = names - set(GROUPS)
        if unknown:
            raise ValueError(f"unknown reduction group(s): {', '.join(sorted(unknown))}")
        return cls(*(g in names for g in GROUPS))

    def __str__(self) -> str:
        on = [g for g in GROUPS if getattr(self, g)]
        return ",".join(on) if on else "none"


@dataclass
class ReductionLog:
    counts: Counter = field(default_factory=Counter)
    contracted: int = 0  # vertices that disappeared through contraction
    deleted_weight: int = 0

    def merge(self, other: "ReductionLog") -> None:
        self.counts.update(other.counts)
        self.contracted += other.contracted
        self.deleted_weight += other.deleted_weight

    def as_dict(self) -> dict:
        d = {r: self.counts.get(r, 0) for r in RULES}
        d["contracted_vertices"] = self.contracted
        d["deleted_weight"] = self.deleted_weight
        return d


Mark = tuple[int, int, str]  # (owner, partner, rule)


# -- rule scans -----------------------------------------------------------

def low_marks(g: Graph, candidates: Optional[Iterable[int]] = None) -> tuple[list[Mark], list[int]]:
    """IsolatedVertex / DegreeOne / DegreeTwo.

    Returns the contraction marks and the isolated non-terminals to drop.
    """
    marks, isolated = [], []
    for v in sorted(g.adj if candidates is None else candidates):
        if v not in g.adj or g.is_terminal(v):
            continue
        nb = g.adj[v]
        if not nb:
            isolated.append(v)
        elif len(nb) == 1:
            (x,) = nb
            marks.append((v, x, "DegreeOne"))
        elif len(nb) == 2:
            # heavier edge; on a tie only the smaller neighbour
            x = max(nb, key=lambda y: (nb[y], -y))
            marks.append((v, x, "DegreeTwo"))
    return marks, isolated


def high_marks(g: Graph, candidates: Optional[Iterable[int]] = None) -> list[Mark]:
    """HeavyEdge, else SemiEnclosed, at most one mark per vertex."""
    marks = []
    for v in sorted(g.adj if candidates is None else candidates):
        if v not in g.adj or g.is_terminal(v) or not g.adj[v]:
            continue
        nb = g.adj[v]
        x = max(nb, key=lambda y: (nb[y], -y))
        if 2 * nb[x] >= g.degree[v]:
            marks.append((v, x, "HeavyEdge"))
            continue
        links = sorted(((w, -y) for y, w in nb.items() if g.is_terminal(y)), reverse=True)
        if not links:
            continue
        w1, t1 = links[0][0], -links[0][1]
        w2 = links[1][0] if len(links) > 1 else 0
        to_terminals = sum(w for w, _ in links)
        if w1 > w2 + (g.degree[v] - to_terminals):
            marks.append((v, t1, "SemiEnclosed"))
    return marks


def triangle_marks(g: Graph, candidates: Optional[Iterable[int]] = None) -> list[Mark]:
    """HeavyTriangle on vertex-disjoint pairs.

    For a triangle (a, b, c) with a, b non-terminal, (a, b) is marked when at
    both a and b the two triangle edges weigh at least as much as the rest
    of the vertex' edges, and in addition the rest at a or at b is no
    heavier than w(a, b).  The extra clause covers c sitting in a third
    block, where the half-degree test alone allows separating a and b to
    be strictly better.
    """
    marks = []
    used: set[int] = set()
    pool = sorted(g.adj if candidates is None else candidates)
    for a in pool:
        if a not in g.adj or a in used or g.is_terminal(a):
            continue
        na = g.adj[a]
        for b in sorted(na):
            if b in used or g.is_terminal(b):
                continue
            nb = g.adj[b]
            small, large = (na, nb) if len(na) <= len(nb) else (nb, na)
            wab = na[b]
            hit = False
            for c in small:
                if c == a or c == b or c not in large:
                    continue
                wac, wbc = na[c], nb[c]
                rest_a = g.degree[a] - wab - wac
                rest_b = g.degree[b] - wab - wbc
                if wab + wac >= rest_a and wab + wbc >= rest_b and min(rest_a, rest_b) <= wab:
                    hit = True
                    break
            if hit:
                marks.append((a, b, "HeavyTriangle"))
                used.add(a)
                used.add(b)
                break
    return marks


def high_connectivity_marks(g: Graph, lambdas: Iterable[int], bound: float,
                            gamma: Optional[dict[tuple[int, int], int]] = None) -> list[Mark]:
    """Edges whose connectivity lower bound beats ``bound`` minus a quarter of
    all isolating cuts but the two largest (compared scaled by 4).

    ``bound`` is the best known cut weight of the current graph (global upper
    bound minus the weight already deleted in this branch).
    """
    if math.isinf(bound):
        return []
    if gamma is None:
        gamma = capforest(g)
    lam = sorted(lambdas)
    spare = sum(lam[:-2]) if len(lam) > 2 else 0
    rhs = 4 * int(bound) - spare
    return [(u, v, "HighConnectivity") for (u, v), c in sorted(gamma.items()) if 4 * c > rhs]


# -- driver ---------------------------------------------------------------

class _Kernelizer:
    def __init__(self, p: Problem, cfg: ReductionConfig, upper: float, executor=None,
                 stop_when_closed: bool = True):
        self.p = p
        self.g = p.graph
        self.cfg = cfg
        self.upper = upper
        self.executor = executor
        self.stop_when_closed = stop_when_closed
        self.log = ReductionLog()
        self.lam: dict[int, int] = {}
        self.cuts: list[STCut] = []
        every = set(self.g.adj)
        self.dirty = {name: set(every) for name in ("low", "high", "triangle")}
        self.gamma_stale = True
        self.gamma: dict[tuple[int, int], int] = {}

    # bookkeeping

    def touch(self, vertices: Iterable[int]) -> None:
        vs = set()
        for v in vertices:
            if v in self.g.adj:
                vs.add(v)
                vs.update(self.g.adj[v])
        for d in self.dirty.values():
            d |= vs
        self.gamma_stale = True

    def delete_terminal_edges(self, at: Optional[Iterable[int]] = None) -> int:
        g = self.g
        sources = g.terminals if at is None else [t for t in at if g.is_terminal(t)]
        removed = 0
        for t in sources:
            for x in [x for x in g.adj[t] if g.is_terminal(x)]:
                w = g.delete_edge(t, x)
                removed += w
                self.p.deleted += w
                self.log.deleted_weight += w
                self.log.counts["TerminalEdgeDeletion"] += 1
                for y in (t, x):
                    i = g.terminal_index[y]
                    if i in self.lam:
                        self.lam[i] -= w
                self.touch((t, x))
        return removed

    def contract_marks(self, marks: list[Mark], forced: bool = False) -> bool:
        if not marks:
            return False
        g = self.g
        uf = UnionFind()
        for u, v, rule in marks:
            if uf.union(u, v):
                self.log.counts[rule] += 1
        merged = []
        for group in uf.groups():
            if len(group) < 2:
                continue
            if sum(g.is_terminal(v) for v in group) > 1:
                if forced:
                    # no cut below the bound keeps these terminals apart
                    self.p.dead = True
                    return True
                raise AssertionError("exchange marks merged two terminals")
            before = g.n
            merged.append(g.contract_vertex_set(group, check_connected=False))
            self.log.contracted += before - g.n
        self.touch(merged)
        self.delete_terminal_edges(merged)
        return True

    # passes

    def contract_isolating(self, cuts: list[STCut]) -> bool:
        g = self.g
        taken: set[int] = set()
        changed = False
        for c in cuts:
            t = c.source
            side = set(c.max_side) - taken
            taken |= c.max_side
            part = {t}
            todo = [t]
            while todo:
                x = todo.pop()
                for y in g.adj[x]:
                    if y in side and y not in part:
                        part.add(y)
                        todo.append(y)
            if len(part) > 1:
                before = g.n
                g.contract_vertex_set(part, check_connected=False)
                self.log.counts["IsolatingCutContraction"] += before - g.n
                self.log.contracted += before - g.n
                self.touch([t])
                self.delete_terminal_edges([t])
                changed = True
        return changed

    def stable_isolating_cuts(self) -> None:
        while True:
            cuts = isolating_cuts(self.g, self.executor)
            if not self.contract_isolating(cuts):
                break
        self.cuts = cuts
        self.lam = {c.terminal: c.value for c in cuts}

    def low_pass(self) -> bool:
        cand, self.dirty["low"] = self.dirty["low"], set()
        marks, isolated = low_marks(self.g, cand)
        for v in isolated:
            self.g.remove_isolated(v)
            self.log.counts["IsolatedVertex"] += 1
        return self.contract_marks(marks) or bool(isolated)

    def high_pass(self) -> bool:
        cand, self.dirty["high"] = self.dirty["high"], set()
        return self.contract_marks(high_marks(self.g, cand))

    def triangle_pass(self) -> bool:
        cand, self.dirty["triangle"] = self.dirty["triangle"], set()
        return self.contract_marks(triangle_marks(self.g, cand))

    def highconn_pass(self) -> bool:
        if not self.gamma_stale:
            return False
        self.gamma = capforest(self.g)
        self.gamma_stale = False
        local = min(self.upper, self.p.upper) - self.p.deleted
        lam = [self.lam.get(i, 0) for i in range(self.g.k)]
        return self.contract_marks(high_connectivity_marks(self.g, lam, local, self.gamma), forced=True)

    def fixpoint(self, step: Callable[[], bool]) -> bool:
        changed = False
        while not self.p.dead and step():
            changed = True
        return changed

    def update_bounds(self) -> None:
        p = self.p
        b = compute_bounds(self.cuts, p.deleted, self.g)
        p.lower = max(p.lower, b.lower)
        p.raw_lower2 = 2 * p.deleted + sum(c.value for c in self.cuts)
        if b.upper < p.upper:
            p.upper = b.upper
            heavy = max(self.cuts, key=lambda c: (c.value, -c.terminal)).terminal if self.cuts else 0
            p.witness = self.g.lift(b.witness, loose_block=heavy)

    def run(self) -> ReductionLog:
        cfg = self.cfg
        self.delete_terminal_edges()
        while True:
            self.stable_isolating_cuts()
            self.update_bounds()
            if self.stop_when_closed and self.p.lower >= min(self.p.upper, self.upper):
                break
            changed = False
            passes = [(cfg.low, self.low_pass), (cfg.high, self.high_pass),
                      (cfg.triangle, self.triangle_pass), (cfg.highconn, self.highconn_pass)]
            for enabled, step in passes:
                if enabled and not self.p.dead:
                    changed |= self.fixpoint(step)
            if self.p.dead or not changed:
                break
        return self.log


def kernelize(p: Problem, cfg: ReductionConfig = ReductionConfig(), upper: float = math.inf,
              executor=None, stop_when_closed: bool = True) -> tuple[Problem, ReductionLog]:
    """Reduce ``p`` in place until no rule applies; refreshes its bounds.

    ``upper`` is the best cut weight known anywhere in the search (it feeds
    HighConnectivity); the problem's own upper bound is used when smaller.
    With ``stop_when_closed`` reductions stop as soon as the bounds meet.
    """
    k = _Kernelizer(p, cfg, upper, executor, stop_when_closed)
    return p, k.run()


# -- single-rule entry points (used by tests and the CLI) ----------------

def delete_terminal_edges(p: Problem) -> int:
    return _Kernelizer(p, ReductionConfig.none(), math.inf).delete_terminal_edges()


def contract_isolating_cuts(p: Problem, executor=None) -> Problem:
    """One round of isolating-cut contraction followed by bound refresh."""
    k = _Kernelizer(p, ReductionConfig.none(), math.inf, executor)
    k.contract_isolating(isolating_cuts(p.graph, executor))
    k.delete_terminal_edges()
    k.cuts = isolating_cuts(p.graph, executor)
    k.update_bounds()
    return p


def apply_rule(p: Problem, group: str, upper: float = math.inf) -> ReductionLog:
    """Run a single rule group to its fixed point (no isolating-cut contraction).

    For ``highconn`` the isolating cut values are computed first; ``upper``
    defaults to the problem's own upper bound.
    """
    k = _Kernelizer(p, ReductionConfig.none(), upper)
    if group == "highconn":
        k.cuts = isolating_cuts(p.graph)
        k.lam = {c.terminal: c.value for c in k.cuts}
        if math.isinf(min(upper, p.upper)):
            k.update_bounds()
    step = {"low": k.low_pass, "high": k.high_pass,
            "triangle": k.triangle_pass, "highconn": k.highconn_pass}[group]
    k.fixpoint(step)
    return k.log
