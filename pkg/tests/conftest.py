import numpy as np
import pytest

from commembed.datasets import load_karate
from commembed.graph import Graph


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def two_cliques(k: int, bridge: bool = True) -> Graph:
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    edges += [(i + k, j + k) for i, j in edges]
    if bridge:
        edges.append((0, k))
    return Graph.from_edges(2 * k, edges)


def two_triangles() -> Graph:
    return Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


def random_graph(rng, n: int, p: float) -> Graph:
    mask = np.triu(rng.random((n, n)) < p, k=1)
    return Graph.from_edges(n, np.argwhere(mask))


@pytest.fixture(scope="session")
def karate():
    return load_karate()
