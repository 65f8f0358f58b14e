"""METIS graph files, terminal files, terminal construction and random instances."""
from __future__ import annotations

import random
from collections import deque
from pathlib import Path
from typing import Iterable, Optional, Union

from .graph import Graph

PathLike = Union[str, Path]


class ParseError(ValueError):
    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.path, self.line = path, line


def _content_lines(path: PathLike):
    with open(path) as fh:
        for no, raw in enumerate(fh, 1):
            s = raw.strip()
            if s.startswith("%"):
                continue
            yield no, s


def read_graph(path: PathLike) -> Graph:
    """Parse a METIS adjacency file (1-indexed on disk, 0-indexed in memory).

    Supported formats: ``0`` (unit weights) and ``1`` / ``001`` (edge weights).
    """
    lines = _content_lines(path)
    for no, s in lines:
        if s:
            break
    else:
        raise ParseError(path, 0, "missing header")
    head = s.split()
    if len(head) < 2:
        raise ParseError(path, no, "header needs 'n m [fmt]'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(path, no, "non-integer header") from None
    fmt = head[2] if len(head) > 2 else "0"
    if fmt.lstrip("0") == "":
        weighted = False
    elif fmt.lstrip("0") == "1":
        weighted = True
    else:
        raise ParseError(path, no, f"unsupported format {fmt!r}")

    entries: dict[tuple[int, int], tuple[int, int]] = {}  # (v, u) -> (w, line)
    v = 0
    for no, s in lines:
        if v >= n:
            if s:
                raise ParseError(path, no, f"more than {n} vertex lines")
            continue
        tok = s.split()
        step = 2 if weighted else 1
        if len(tok) % step:
            raise ParseError(path, no, "odd number of tokens in weighted line")
        for i in range(0, len(tok), step):
            try:
                u = int(tok[i]) - 1
                w = int(tok[i + 1]) if weighted else 1
            except ValueError:
                raise ParseError(path, no, f"bad token {tok[i]!r}") from None
            if not 0 <= u < n:
                raise ParseError(path, no, f"neighbour {u + 1} out of range")
            if u == v:
                raise ParseError(path, no, "self-loop")
            if w <= 0:
                raise ParseError(path, no, f"non-positive weight {w}")
            if (v, u) in entries:
                raise ParseError(path, no, f"duplicate neighbour {u + 1}")
            entries[(v, u)] = (w, no)
        v += 1
    if v < n:
        raise ParseError(path, no if v else 1, f"expected {n} vertex lines, got {v}")

    g = Graph(n)
    for (a, b), (w, no) in entries.items():
        back = entries.get((b, a))
        if back is None:
            raise ParseError(path, no, f"edge ({a + 1},{b + 1}) has no reverse entry")
        if back[0] != w:
            raise ParseError(path, no, f"weight of ({a + 1},{b + 1}) disagrees with reverse entry")
        if a < b:
            g.add_edge(a, b, w)
    if g.m != m:
        raise ParseError(path, 1, f"header says {m} edges, found {g.m}")
    return g


def write_graph(g: Graph, path: PathLike) -> list[int]:
    """Write ``g`` as an edge-weighted METIS file; returns the vertex order used."""
    h, order = g.relabeled()
    lines = [f"{h.n} {h.m} 1"]
    for v in range(h.n):
        lines.append(" ".join(f"{u + 1} {w}" for u, w in sorted(h.adj[v].items())))
    Path(path).write_text("\n".join(lines) + "\n")
    return order


def read_terminals(path: PathLike) -> list[int]:
    """Whitespace-separated 1-indexed vertex ids; ``%`` starts a comment line."""
    out = []
    for no, s in _content_lines(path):
        for tok in s.split():
            try:
                out.append(int(tok) - 1)
            except ValueError:
                raise ParseError(path, no, f"bad terminal id {tok!r}") from None
    return out


def make_terminals(g: Graph, *, explicit: Optional[Iterable[int]] = None, k: Optional[int] = None,
                   fraction: Optional[float] = None, rng: Optional[random.Random] = None) -> Graph:
    """Mark terminals on ``g`` (in place) and return it.

    Exactly one source: ``explicit`` ids, ``k`` random vertices, or ``k``
    random seeds each grown by simultaneous BFS to ``floor(fraction*n/k)``
    vertices and contracted into the seed.  Growing changes the instance.
    """
    rng = rng or random.Random(0)
    if explicit is not None:
        if k is not None or fraction is not None:
            raise ValueError("give exactly one terminal source")
        g.set_terminals(list(explicit))
        return g
    if k is None:
        raise ValueError("no terminal source given")
    n = g.n
    if not 1 <= k <= n:
        raise ValueError(f"cannot pick {k} terminals from {n} vertices")
    seeds = rng.sample(sorted(g.adj), k)
    if fraction is None:
        g.set_terminals(seeds)
        return g
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie strictly between 0 and 1")
    quota = int(fraction * n / k)
    if quota * k > n:
        raise ValueError("growth demands exceed the number of vertices")
    owner = {s: i for i, s in enumerate(seeds)}
    balls = [[s] for s in seeds]
    fronts = [deque([s]) for s in seeds]
    growing = True
    while growing:
        growing = False
        for i in range(k):
            if len(balls[i]) >= quota:
                continue
            front = fronts[i]
            while front:
                x = front[0]
                fresh = [y for y in sorted(g.adj[x]) if y not in owner]
                if not fresh:
                    front.popleft()
                    continue
                y = fresh[0]
                owner[y] = i
                balls[i].append(y)
                front.append(y)
                growing = True
                break
    g.set_terminals(seeds)
    for ball in balls:
        g.contract_vertex_set(ball)
    return g


def generate_random_graph(n: int, avg_deg: float, max_w: int, seed: int) -> Graph:
    """Connected random graph: a random spanning tree plus uniform extra edges
    up to ``round(n * avg_deg / 2)`` edges, weights uniform in ``[1, max_w]``."""
    if n <= 0 or avg_deg <= 0 or max_w <= 0:
        raise ValueError("parameters must be positive")
    rng = random.Random(seed)
    g = Graph(n)
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        g.add_edge(order[i], order[rng.randrange(i)], rng.randint(1, max_w))
    target = min(round(n * avg_deg / 2), n * (n - 1) // 2)
    while g.m < target:
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v and not g.has_edge(u, v):
            g.add_edge(u, v, rng.randint(1, max_w))
    return g


def random_instance(n: int, k: int, avg_deg: float, max_w: int, seed: int) -> Graph:
    """Random graph with ``k`` random terminals, reproducible from ``seed``."""
    g = generate_random_graph(n, avg_deg, max_w, seed)
    return make_terminals(g, k=k, rng=random.Random(seed * 7919 + 1))
