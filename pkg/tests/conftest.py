import functools
import random
import sys
from pathlib import Path

import pytest

from mtcut.graph import Graph
from mtcut.instances import random_instance
from mtcut.oracle import oracle_weight

HERE = Path(__file__).resolve().parent
STUB_SOLVER = f"{sys.executable} {HERE / 'ilp_solver_stub.py'} {{lp}} {{sol}}"

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE: dict[int, str] = {}


def gex() -> Graph:
    """t1=0, t2=1, t3=2, a=3, b=4; optimum 4."""
    return Graph.from_edges(5, [(0, 3, 3), (1, 3, 1), (2, 4, 2), (3, 4, 2), (1, 4, 1)], [0, 1, 2])


GEX_METIS = "% five vertex example\n5 5 1\n4 3\n4 1 5 1\n5 2\n1 3 2 1 5 2\n3 2 4 2 2 1\n"


def small_params(seed: int) -> tuple[int, int, int]:
    rng = random.Random(seed)
    return rng.randint(5, 12), rng.choice([3, 4]), rng.choice([2, 3, 4, 5])


def small_instance(seed: int) -> Graph:
    n, k, d = small_params(seed)
    return random_instance(n, k, d, 5, seed)


@functools.lru_cache(maxsize=None)
def small_optimum(seed: int) -> int:
    return oracle_weight(small_instance(seed))


@pytest.fixture
def g_ex() -> Graph:
    return gex()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[num])
