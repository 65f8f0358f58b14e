"""Exhaustive multiterminal cut by enumerating block assignments.

Only meant for desk-scale instances; it refuses to run past ``cap``
assignments.  The enumeration is a mixed-radix counter over the
non-terminal vertices sorted by id (first vertex = most significant digit),
evaluated in numpy chunks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

DEFAULT_CAP = 10**7
_CHUNK = 1 << 16


class OracleRefused(RuntimeError):
    """The instance needs more assignments than the configured cap."""


@dataclass
class OracleResult:
    weight: int
    assignments: list[dict[int, int]] = field(repr=False)
    count: int = 0  # assignments enumerated
    n_optimal: int = 0  # total number of optimal assignments

    @property
    def assignment(self) -> dict[int, int]:
        return self.assignments[0]


def brute_force(g: Graph, cap: int = DEFAULT_CAP, keep: int = 64) -> OracleResult:
    k = g.k
    if k == 0:
        raise ValueError("no terminals")
    free = sorted(v for v in g.adj if not g.is_terminal(v))
    total = k ** len(free)
    if total > cap:
        raise OracleRefused(f"{k}^{len(free)} = {total} assignments exceed cap {cap}")

    col = {v: i for i, v in enumerate(free)}
    fixed_cost = 0
    # edges between two free vertices, and free-to-terminal edges
    ff_u, ff_v, ff_w = [], [], []
    ft_v, ft_b, ft_w = [], [], []
    for u, v, w in g.edges():
        tu, tv = g.terminal_index.get(u), g.terminal_index.get(v)
        if tu is not None and tv is not None:
            fixed_cost += w if tu != tv else 0
        elif tu is not None:
            ft_v.append(col[v]); ft_b.append(tu); ft_w.append(w)
        elif tv is not None:
            ft_v.append(col[u]); ft_b.append(tv); ft_w.append(w)
        else:
            ff_u.append(col[u]); ff_v.append(col[v]); ff_w.append(w)
    ff_u, ff_v, ff_w = np.array(ff_u, int), np.array(ff_v, int), np.array(ff_w, np.int64)
    ft_v, ft_b, ft_w = np.array(ft_v, int), np.array(ft_b, int), np.array(ft_w, np.int64)
    digits = k ** np.arange(len(free) - 1, -1, -1, dtype=np.int64)

    best = None
    best_codes: list[int] = []
    n_best = 0
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        blocks = (codes[:, None] // digits[None, :]) % k
        cost = np.full(len(codes), fixed_cost, dtype=np.int64)
        if len(ff_w):
            cost += ((blocks[:, ff_u] != blocks[:, ff_v]) * ff_w).sum(axis=1)
        if len(ft_w):
            cost += ((blocks[:, ft_v] != ft_b[None, :]) * ft_w).sum(axis=1)
        lo = int(cost.min())
        if best is None or lo < best:
            best, best_codes, n_best = lo, [], 0
        if lo == best:
            hits = codes[cost == lo]
            n_best += len(hits)
            best_codes.extend(int(c) for c in hits[: max(0, keep - len(best_codes))])

    def decode(code: int) -> dict[int, int]:
        out = {t: i for i, t in enumerate(g.terminals)}
        for v, d in zip(free, digits):
            out[v] = int(code // int(d)) % k
        return out

    return OracleResult(best, [decode(c) for c in best_codes], total, n_best)


def oracle_weight(g: Graph, cap: int = DEFAULT_CAP) -> int:
    return brute_force(g, cap, keep=1).weight
