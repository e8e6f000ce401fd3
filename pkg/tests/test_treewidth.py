"""Exact treewidth and its bounds against the elimination-order oracle."""

import random

import pytest

import oracles
from rcdkit.generators import grid
from rcdkit.graphs import Graph, contract_set
from rcdkit.treedecomp import validate
from rcdkit.treewidth import exact_treewidth, lower_bound, upper_bound


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def random_graph(rng, n, p=0.4):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < p]
    return Graph(n, edges)


def test_exact_frozen_values():
    assert exact_treewidth(Graph(0, []))[0] == -1
    assert exact_treewidth(Graph(3, []))[0] == 0
    assert exact_treewidth(Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)]))[0] == 1
    assert exact_treewidth(cycle(6))[0] == 2
    assert exact_treewidth(complete(4))[0] == 3
    assert exact_treewidth(complete(5))[0] == 4
    assert exact_treewidth(grid(3).graph)[0] == 3
    assert exact_treewidth(grid(4).graph, limit=16)[0] == 4


def test_exact_respects_limit():
    with pytest.raises(ValueError):
        exact_treewidth(complete(16))
    w, td = exact_treewidth(complete(16), limit=16)
    assert w == 15


def test_exact_certificate_is_valid():
    rng = random.Random(3)
    for _ in range(200):
        g = random_graph(rng, rng.randint(0, 9))
        w, td = exact_treewidth(g)
        assert td.width == w
        if g.n:
            assert validate(td, g)["ok"]


def test_exact_matches_elimination_oracle():
    rng = random.Random(5)
    for _ in range(250):
        g = random_graph(rng, rng.randint(0, 8), rng.choice([0.2, 0.4, 0.7]))
        want = oracles.tw_by_elimination(g.n, g.edges)
        assert exact_treewidth(g)[0] == want, g.edges


def test_bounds_bracket_exact():
    rng = random.Random(9)
    for _ in range(300):
        g = random_graph(rng, rng.randint(1, 10))
        w, _ = exact_treewidth(g)
        assert lower_bound(g) <= w <= upper_bound(g)[0]


def test_bounds_on_grids():
    ub, td = upper_bound(grid(6).graph)
    assert ub <= 8
    assert validate(td, grid(6).graph)["ok"]
    assert lower_bound(grid(5).graph) >= 3
    assert upper_bound(complete(5))[0] == 4
    assert lower_bound(complete(5)) == 4


def test_contracting_an_edge_moves_width_by_at_most_one():
    rng = random.Random(15)
    for _ in range(200):
        g = random_graph(rng, rng.randint(2, 8), 0.5)
        if not g.edges:
            continue
        e = sorted(g.edges)[rng.randrange(len(g.edges))]
        target, _ = contract_set(g, set(e))
        w = exact_treewidth(g)[0]
        wc = exact_treewidth(target)[0]
        assert wc <= w <= wc + 1, (g.edges, e)
