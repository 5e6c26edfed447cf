from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import HealthCheck, settings

from approxdeco.graph import Graph

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(m: int) -> Graph:
    """Path with ``m`` edges; edge ``i`` joins ``i`` and ``i + 1``."""
    return Graph(m + 1, [(i, i + 1) for i in range(m)])


def complete_graph(n: int) -> Graph:
    return Graph(n, list(itertools.combinations(range(n), 2)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def random_bipartite(rng: random.Random, max_side: int = 8, max_edges: int = 40) -> Graph:
    a, b = rng.randint(1, max_side), rng.randint(1, max_side)
    pairs = [(i, a + j) for i in range(a) for j in range(b)]
    k = rng.randint(1, min(len(pairs), max_edges))
    return Graph(a + b, sorted(rng.sample(pairs, k)))


@pytest.fixture
def k5() -> Graph:
    return complete_graph(5)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
