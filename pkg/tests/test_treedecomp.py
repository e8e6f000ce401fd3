"""Tree decomposition axioms, torsos, gluing, and serialization."""

import random

import pytest

from rcdkit.graphs import Graph, contract_set, induced_subgraph, is_connected
from rcdkit.treedecomp import (TreeDecomposition, adhesion, from_td_text,
                               gamma_set, glue, induced_by_contraction, torso,
                               torso_vertices, to_td_text, validate)
from rcdkit.treewidth import exact_treewidth


def path_td():
    # P4 as three bags along a path.
    return TreeDecomposition([-1, 0, 1], [{0, 1}, {1, 2}, {2, 3}])


def random_graph(rng, n, p=0.4):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < p]
    return Graph(n, edges)


def test_constructor_validation():
    with pytest.raises(ValueError):
        TreeDecomposition([], [])
    with pytest.raises(ValueError):
        TreeDecomposition([-1, -1], [{0}, {1}])
    with pytest.raises(ValueError):
        TreeDecomposition([1, 0], [{0}, {1}])
    td = path_td()
    assert td.root == 0 and td.n_nodes == 3 and td.width == 1
    assert td.children(1) == [2]
    assert td.subtree(0) == [0, 1, 2]


def test_validate_accepts_path_decomposition():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    assert validate(path_td(), g)["ok"]


def test_validate_flags_each_axiom():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    no_vertex = TreeDecomposition([-1, 0], [{0, 1}, {1, 2}])
    rep = validate(no_vertex, g)
    assert not rep["covers_vertices"]
    assert rep["witnesses"]["missing_vertices"] == [3]

    no_edge = TreeDecomposition([-1, 0], [{0, 1, 2}, {3}])
    rep = validate(no_edge, g)
    assert not rep["covers_edges"]
    assert rep["witnesses"]["missing_edges"] == [[2, 3]]

    split = TreeDecomposition([-1, 0, 1], [{0, 1}, {1, 2}, {0, 2, 3}])
    rep = validate(split, g)
    assert not rep["vertex_connected"]
    assert rep["witnesses"]["disconnected_vertices"] == [0]


def test_adhesion_and_gamma():
    td = path_td()
    assert adhesion(td, 0) == frozenset()
    assert adhesion(td, 2) == frozenset({2})
    assert gamma_set(td, 1) == frozenset({1, 2, 3})
    assert torso_vertices(td, 1) == frozenset({1, 2})
    with pytest.raises(ValueError):
        adhesion(td, 9)


def test_torso_adds_adhesion_cliques():
    # Star bag with two children sharing pairs of leaves.
    g = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    td = TreeDecomposition([-1, 0, 0], [{0, 1, 2, 3, 4}, {1, 2}, {3, 4}])
    t = torso(td, g, 0)
    assert t.has_edge(1, 2) and t.has_edge(3, 4)
    assert not t.has_edge(1, 3)
    assert torso(td, g, 1).edge_list() == []


def test_glue_reassembles_valid_decomposition():
    rng = random.Random(11)
    for _ in range(100):
        g = random_graph(rng, rng.randint(2, 9))
        w, td = exact_treewidth(g)
        assert validate(td, g)["ok"]
        per = []
        for t in range(td.n_nodes):
            tor = torso(td, g, t)
            sub, order = induced_subgraph(tor, td.bags[t])
            wt, inner = exact_treewidth(sub)
            lifted = TreeDecomposition(
                inner.parent,
                [{order[v] for v in b} for b in inner.bags])
            per.append(lifted)
        glued = glue(td, per, g)
        assert validate(glued, g)["ok"]
        assert glued.width <= 2 * td.width + 1


def test_induced_by_contraction_stays_valid():
    rng = random.Random(13)
    for _ in range(300):
        g = random_graph(rng, rng.randint(2, 9))
        w, td = exact_treewidth(g)
        u = {v for v in range(g.n) if rng.random() < 0.4}
        target, q = contract_set(g, u)
        out = induced_by_contraction(td, q)
        rep = validate(out, target)
        assert rep["ok"]
        assert out.width <= td.width


def test_td_text_round_trip():
    rng = random.Random(17)
    for _ in range(50):
        g = random_graph(rng, rng.randint(1, 8))
        w, td = exact_treewidth(g)
        text = to_td_text(td, g.n)
        again = from_td_text(text)
        assert again.bags == td.bags
        assert validate(again, g)["ok"]
    assert to_td_text(path_td(), 4).startswith("s td 3 2 4\n")
