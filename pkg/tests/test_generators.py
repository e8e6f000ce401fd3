"""Instance generators: grids, subdivisions, and seeded planar graphs."""

import random

import pytest

from rcdkit.embedding import radial_layering
from rcdkit.generators import grid, random_planar, subdivided_grid
from rcdkit.graphs import is_connected


def test_grid_shape():
    emb = grid(5)
    assert emb.graph.n == 25
    assert len(emb.graph.edges) == 40
    assert emb.genus == 0
    assert emb.n_faces == 17
    lay = radial_layering(emb)
    assert [len(lay.layer(i)) for i in range(1, lay.depth + 1)] == [16, 8, 1]


def test_grid_edge_cases():
    with pytest.raises(ValueError):
        grid(0)
    solo = grid(1)
    assert solo.graph.n == 1 and solo.n_faces == 1
    assert radial_layering(solo).depth == 1


def test_subdivided_grid_shape():
    emb = subdivided_grid(2)
    assert emb.graph.n == 8
    assert len(emb.graph.edges) == 8
    assert emb.genus == 0
    assert all(emb.graph.degree(v) in (2,) or emb.graph.degree(v) == 2
               for v in range(4, 8))
    emb = subdivided_grid(3)
    assert emb.graph.n == 9 + 12
    assert len(emb.graph.edges) == 24
    assert radial_layering(emb).depth >= 2


def test_random_planar_is_deterministic():
    a = random_planar(12, 99)
    b = random_planar(12, 99)
    assert a.graph == b.graph
    assert a.rotation == b.rotation
    assert a.outer_face == b.outer_face
    c = random_planar(12, 100)
    assert c.graph != a.graph or c.rotation != a.rotation


def test_random_planar_properties():
    rng = random.Random(42)
    for _ in range(40):
        n = rng.randint(3, 24)
        emb = random_planar(n, rng.randint(0, 10 ** 6))
        assert emb.graph.n == n
        assert emb.genus == 0
        assert is_connected(emb.graph)
        radial_layering(emb)


def test_random_planar_full_triangulation():
    emb = random_planar(10, 7, delete_fraction=0.0)
    assert len(emb.graph.edges) == 3 * 10 - 6
    assert emb.n_faces == 2 * 10 - 4
