from itertools import combinations

import numpy as np
import pytest

from rigclique.instance import IntersectionInstance, SparseGraph


_verdicts = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record and print a one-line acceptance verdict, then assert it."""
    lines = request.config.stash.setdefault(_verdicts, [])

    def record(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        lines.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_verdicts, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def cover_instance():
    """Four points covered by A={1,2,3}, B={1,3,4}, C={2,3,4}; attributes A, B, C = 0, 1, 2."""
    return IntersectionInstance.from_subsets([[0, 1], [0, 2], [0, 1, 2], [1, 2]], m=3)


def naive_graph(inst: IntersectionInstance) -> SparseGraph:
    sets = [set(s) for s in inst.subsets]
    edges = [(u, v) for u, v in combinations(range(inst.n), 2) if sets[u] & sets[v]]
    return SparseGraph.from_edges(inst.n, edges)


def random_graph(n: int, p: float, rng: np.random.Generator) -> SparseGraph:
    edges = [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p]
    return SparseGraph.from_edges(n, edges)


def cycle_graph(n: int) -> SparseGraph:
    return SparseGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
