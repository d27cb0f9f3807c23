import json

import numpy as np
import pytest

import graphdecay as gd


@pytest.fixture(scope="session")
def d():
    return gd.combinatorial_metric()


@pytest.fixture(scope="session")
def tree3():
    return gd.RegularTreeFamily(3)


@pytest.fixture(scope="session")
def tree4():
    return gd.RegularTreeFamily(4)


@pytest.fixture(scope="session")
def ray_half():
    return gd.WeightedRayFamily(0.5)


@pytest.fixture(scope="session")
def tree3_end(tree3):
    return gd.ends(tree3, {"0"}).ends[0]


@pytest.fixture(scope="session")
def ray_end(ray_half):
    return gd.ends(ray_half, {"0"}).ends[0]


def random_connected_graph(n, rng, normalized=True):
    """Random connected weighted graph: a spine plus random chords."""
    edges = {}
    for i in range(n - 1):
        edges[(i, i + 1)] = float(rng.uniform(0.2, 2.0))
    for _ in range(n):
        i, j = sorted(rng.integers(0, n, size=2).tolist())
        if i != j and (i, j) not in edges:
            edges[(i, j)] = float(rng.uniform(0.2, 2.0))
    deg = np.zeros(n)
    for (i, j), w in edges.items():
        deg[i] += w
        deg[j] += w
    if normalized:
        masses = deg
    else:
        masses = rng.uniform(0.5, 3.0, size=n)
    vertices = [(str(i), float(masses[i])) for i in range(n)]
    triples = [(str(i), str(j), w) for (i, j), w in edges.items()]
    return gd.make_graph(vertices, triples)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def path5():
    """Finite path file graph on 5 vertices, normalized masses."""
    vertices = [("p0", 1.0), ("p1", 2.0), ("p2", 2.0), ("p3", 2.0), ("p4", 1.0)]
    edges = [("p0", "p1", 1.0), ("p1", "p2", 1.0), ("p2", "p3", 1.0),
             ("p3", "p4", 1.0)]
    g = gd.make_graph(vertices, edges)
    return gd.FileFamily(g, root_id="p0")


@pytest.fixture
def graph_file(tmp_path):
    data = {
        "vertices": [{"id": "a", "m": 2.0}, {"id": "b", "m": 3.0},
                     {"id": "c", "m": 1.0}],
        "edges": [{"u": "a", "v": "b", "w": 2.0}, {"u": "b", "v": "c", "w": 1.0}],
    }
    path = tmp_path / "g.json"
    path.write_text(json.dumps(data))
    return path
