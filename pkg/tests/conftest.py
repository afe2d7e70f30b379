"""Shared fixtures: the small named battery and atlas graph loaders."""

import random
from typing import List, Optional, Tuple

import pytest

from orientcut.graphs import (
    UndirectedGraph,
    complete_graph,
    cycle_graph,
    path_graph,
    paw_graph,
    single_edge,
)
from orientcut.model import ModelPoint

# (name, graph, min orientation diameter)
BATTERY: List[Tuple[str, UndirectedGraph, int]] = [
    ("edge", single_edge(), 1),
    ("P3", path_graph(3), 1),
    ("P4", path_graph(4), 1),
    ("C4", cycle_graph(4), 1),
    ("K3", complete_graph(3), 2),
    ("paw", paw_graph(), 2),
    ("K4", complete_graph(4), 3),
]

_ATLAS_CACHE: dict = {}


def atlas_graphs(max_edges: Optional[int] = None, max_nodes: Optional[int] = None,
                 connected: bool = False) -> List[UndirectedGraph]:
    """Non-isomorphic small graphs, relabeled onto 0..n-1."""
    key = (max_edges, max_nodes, connected)
    if key in _ATLAS_CACHE:
        return _ATLAS_CACHE[key]
    import networkx as nx

    out = []
    for ag in nx.graph_atlas_g():
        n, m = ag.number_of_nodes(), ag.number_of_edges()
        if n == 0:
            continue
        if max_edges is not None and m > max_edges:
            continue
        if max_nodes is not None and n > max_nodes:
            continue
        if connected and (n == 0 or not nx.is_connected(ag)):
            continue
        nodes = sorted(ag.nodes())
        idx = {v: i for i, v in enumerate(nodes)}
        out.append(UndirectedGraph(n, [(idx[u], idx[v]) for u, v in ag.edges()]))
    _ATLAS_CACHE[key] = out
    return out


def random_point(g: UndirectedGraph, kappa: int, rng: random.Random) -> ModelPoint:
    w = tuple(rng.random() for _ in range(2 * g.m))
    return ModelPoint(w, rng.random() * kappa)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
