import random
from pathlib import Path

import pytest

from deconv.graph import UnlArc, UnlGraph, UnlNode
from deconv.inventories import load_inventories
from deconv.uw import UW

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "deconv" / "data"
FIXTURE_DIR = Path(__file__).resolve().parent / "data"

RELATIONS = ["agt", "obj", "ben", "mod", "tim", "plc", "gol", "con"]


@pytest.fixture(scope="session")
def demo_inventories():
    return load_inventories(DATA_DIR / "inventories.cfg")


def make_graph(n_nodes: int, arcs: list[tuple[int, int, str]], entry: int = 1) -> UnlGraph:
    nodes = tuple(
        UnlNode(
            id=i,
            uw=UW(f"w{i}"),
            attributes=frozenset({"entry"}) if i == entry else frozenset(),
        )
        for i in range(1, n_nodes + 1)
    )
    return UnlGraph(nodes, tuple(UnlArc(s, t, l) for s, t, l in arcs), entry, ())


def _random_connected(rng: random.Random, max_arcs: int, forward_only: bool = False):
    n_arcs = rng.randint(1, max_arcs)
    n_nodes = rng.randint(2, n_arcs + 1)
    arcs: list[tuple[int, int, str]] = []
    # random spanning tree keeps the undirected view connected
    for node in range(2, n_nodes + 1):
        parent = rng.randint(1, node - 1)
        if forward_only or rng.random() < 0.8:
            arcs.append((parent, node, rng.choice(RELATIONS)))
        else:
            arcs.append((node, parent, rng.choice(RELATIONS)))
    attempts = 0
    while len(arcs) < n_arcs and attempts < 10 * n_arcs:
        attempts += 1
        a, b = rng.randint(1, n_nodes), rng.randint(1, n_nodes)
        if a == b:
            continue
        label = rng.choice(RELATIONS)
        if (a, b, label) in arcs:
            continue
        arcs.append((a, b, label))
    return make_graph(n_nodes, arcs)


def _random_disconnected(rng: random.Random, max_arcs: int):
    g1 = _random_connected(rng, max_arcs)
    g2 = _random_connected(rng, max(1, max_arcs // 2))
    offset = len(g1.nodes)
    nodes = list(g1.nodes)
    for node in g2.nodes:
        nodes.append(
            UnlNode(id=node.id + offset, uw=UW(f"w{node.id + offset}"), attributes=frozenset())
        )
    arcs = list(g1.arcs) + [
        UnlArc(a.source + offset, a.target + offset, a.label) for a in g2.arcs
    ]
    return UnlGraph(tuple(nodes), tuple(arcs), g1.entry, ())


@pytest.fixture(scope="session")
def random_connected_graph():
    return _random_connected


@pytest.fixture(scope="session")
def random_disconnected_graph():
    return _random_disconnected


@pytest.fixture(scope="session")
def random_forward_graph():
    def gen(rng: random.Random, max_arcs: int):
        return _random_connected(rng, max_arcs, forward_only=True)

    return gen
