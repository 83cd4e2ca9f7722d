"""Shared instances and brute-force helpers."""

import numpy as np
import pytest

from color_oracle.graph import (
    Coloring,
    Graph,
    color_distance_matrix,
    disjoint_union,
    distance_matrix,
    random_coloring,
    random_connected_graph,
)


def random_instance(n, sigma, seed, extra_edges=None, max_weight=8):
    """Connected random graph with every color used."""
    extra = n if extra_edges is None else extra_edges
    graph = random_connected_graph(n, extra_edges=extra, max_weight=max_weight, seed=seed)
    return graph, random_coloring(n, sigma, seed=seed)


def exact_color_distances(graph, coloring):
    """[n x sigma] float table of dist(v, c); inf where c is absent from v's component."""
    return color_distance_matrix(distance_matrix(graph), coloring)


@pytest.fixture
def small_instance():
    return random_instance(40, 6, seed=1)


@pytest.fixture
def split_instance():
    """Two components; color 2 lives only in the second one."""
    left = random_connected_graph(12, extra_edges=6, max_weight=5, seed=3)
    right = random_connected_graph(10, extra_edges=4, max_weight=5, seed=4)
    graph = disjoint_union([left, right])
    rng = np.random.default_rng(5)
    colors = [int(c) for c in rng.integers(0, 2, 12)] + [2] * 3 + [0, 1] * 3 + [1]
    colors[0], colors[1] = 0, 1
    return graph, Coloring(3, tuple(colors))


@pytest.fixture
def path_graph():
    """0 -1- 1 -2- 2 -3- 3, colors a b a b."""
    return Graph(4, ((0, 1, 1), (1, 2, 2), (2, 3, 3))), Coloring(2, (0, 1, 0, 1))
