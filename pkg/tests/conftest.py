"""Shared fixtures and helpers."""
import random
from itertools import combinations

import networkx as nx
import pytest

from src.services.graph_core import Graph, build


@pytest.fixture(autouse=True)
def quiet_progress(monkeypatch):
    monkeypatch.setenv("SQLAB_PROGRESS", "false")


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return build(n, [(a, b) for a, b in combinations(range(n), 2) if rng.random() < p])


def to_nx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    out.add_edges_from((e.u, e.v) for e in g.edges())
    return out
