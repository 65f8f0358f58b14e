from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .graph import Graph


@dataclass(eq=False)
class Problem:
    """One node of the search: a (partly reduced) graph plus its bounds.

    ``lower`` and ``upper`` bound the weight of the best multiterminal cut of
    the original component inside this branch, so both already include
    ``deleted``.  ``witness`` maps original vertex ids to terminal indices
    and realizes at most ``upper``.
    """

    graph: Graph
    lower: int = 0
    upper: float = math.inf
    deleted: int = 0
    witness: Optional[dict[int, int]] = field(default=None, repr=False)
    seq: int = 0
    depth: int = 0
    # set when reductions proved that no cut below the global bound exists here
    dead: bool = False
    # doubled real-valued lower bound (2*deleted + sum of isolating cuts)
    raw_lower2: int = 0

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def active(self) -> int:
        return len(self.graph.active_terminals())

    @property
    def closed(self) -> bool:
        return self.lower >= self.upper

    def spawn(self, graph: Graph, deleted: int, seq: int) -> "Problem":
        return Problem(graph, lower=self.lower, deleted=deleted, seq=seq,
                       depth=self.depth + 1, raw_lower2=self.raw_lower2)
