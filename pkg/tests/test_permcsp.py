"""Permutation CSP deletion: encodings, propagation, tree DP, and the pipeline."""

import random

import pytest

import oracles
from instances import grid_with_odd_faces
from rcdkit.graphs import Graph, contract_set
from rcdkit.permcsp import (DeletionSolution, Infeasible, PermCspInstance,
                            SizeConstraint, brute_force, component_assignments,
                            component_satisfiable, deletion_feasible, dp_delete,
                            encode_coc, encode_multiway, encode_oct,
                            subexp_solve)
from rcdkit.rcd import Rcd, decompose_embedded
from rcdkit.treedecomp import TreeDecomposition
from rcdkit.treewidth import upper_bound


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n):
    return Graph(n, [(a, b) for a in range(n) for b in range(a + 1, n)])


def heuristic_dp(inst, sc, k, mode, undeletable=()):
    """dp_delete over the elimination-heuristic decomposition, no contraction."""
    target, q = contract_set(inst.graph, set(undeletable))
    td = upper_bound(target)[1]
    return dp_delete(inst, sc, td, q, k, mode, undeletable=frozenset(undeletable))


def random_connected(rng, n, extra):
    verts = list(range(n))
    rng.shuffle(verts)
    edges = set()
    for i in range(1, n):
        u, v = verts[i], verts[rng.randrange(i)]
        edges.add((min(u, v), max(u, v)))
    target = min(n * (n - 1) // 2, n - 1 + extra)
    while len(edges) < target:
        u, v = rng.sample(range(n), 2)
        edges.add((min(u, v), max(u, v)))
    return Graph(n, edges)


def random_partition(rng, n, p):
    verts = list(range(n))
    rng.shuffle(verts)
    cls = [set() for _ in range(p)]
    for i, v in enumerate(verts):
        cls[i % p].add(v)
    return Rcd(p, [frozenset(c) for c in cls], frozenset())


def ceil_sqrt(k):
    r = 0
    while r * r < k:
        r += 1
    return r


def test_encode_oct_triangle():
    inst, sc = encode_oct(complete(3))
    assert (inst.n, inst.d, inst.size) == (3, 2, 5)
    assert all(rel == frozenset({(0, 1), (1, 0)}) for _, _, rel in inst.constraints)
    assert sc.weights == {} and sc.delta == 0

    sol = brute_force(inst, sc, 1, "vertex")
    assert isinstance(sol, DeletionSolution)
    assert sol.deleted == frozenset({0})
    assert isinstance(brute_force(inst, sc, 0, "vertex"), Infeasible)

    rcd = Rcd(1, [frozenset({0, 1, 2})], frozenset())
    pipe = subexp_solve(inst, sc, 1, rcd)
    assert isinstance(pipe, DeletionSolution) and len(pipe.deleted) == 1
    assert isinstance(subexp_solve(inst, sc, 0, rcd), Infeasible)


def test_encode_multiway_path():
    inst, sc = encode_multiway(path(3), [0, 2])
    assert inst.d == 2
    assert sc.delta == 0
    # a terminal pays one unit for carrying any label but its own
    assert sc.weights == {(0, 1): 1, (2, 0): 1}

    assert not deletion_feasible(inst, sc, set(), "vertex")
    assert deletion_feasible(inst, sc, {1}, "vertex")
    sol = brute_force(inst, sc, 1, "vertex")
    assert isinstance(sol, DeletionSolution) and len(sol.deleted) == 1


def test_encode_coc_k4():
    inst, sc = encode_coc(complete(4), 1)
    assert inst.d == 1
    assert sc.weights == {(v, 0): 1 for v in range(4)} and sc.delta == 1

    sol = brute_force(inst, sc, 3, "vertex")
    assert sol.deleted == frozenset({0, 1, 2})
    assert isinstance(brute_force(inst, sc, 2, "vertex"), Infeasible)

    rcd = Rcd(2, [frozenset({0, 1}), frozenset({2, 3})], frozenset())
    best = subexp_solve(inst, sc, 3, rcd, minimize=True)
    assert len(best.deleted) == 3
    assert deletion_feasible(inst, sc, best.deleted, "vertex")
    assert isinstance(subexp_solve(inst, sc, 2, rcd), Infeasible)


def test_component_assignment_counts():
    lone = PermCspInstance(1, 3, [])
    assert component_assignments(lone, [0]) == ({0: 0}, {0: 1}, {0: 2})
    assert component_satisfiable(lone, [0], SizeConstraint({}, 0))

    odd, _ = encode_oct(cycle(5))
    assert component_assignments(odd, range(5)) == ()
    assert not component_satisfiable(odd, range(5), SizeConstraint({}, 0))

    even, _ = encode_oct(cycle(6))
    found = component_assignments(even, range(6))
    assert found == (
        {0: 0, 1: 1, 2: 0, 3: 1, 4: 0, 5: 1},
        {0: 1, 1: 0, 2: 1, 3: 0, 4: 1, 5: 0},
    )

    # the propagated candidate count never exceeds the domain size
    rng = random.Random(3)
    for _ in range(20):
        g = random_connected(rng, rng.randint(2, 8), rng.randint(0, 3))
        inst, _ = encode_multiway(g, rng.sample(range(g.n), 2))
        assert len(component_assignments(inst, range(g.n))) <= inst.d

    with pytest.raises(ValueError, match="not connected"):
        component_assignments(odd, [0, 2])
    with pytest.raises(ValueError, match="empty"):
        component_assignments(odd, [])


def test_dp_c5_examples():
    inst, sc = encode_oct(cycle(5))

    sol = heuristic_dp(inst, sc, 1, "vertex")
    assert isinstance(sol, DeletionSolution) and len(sol.deleted) == 1
    assert deletion_feasible(inst, sc, sol.deleted, "vertex")
    assert isinstance(heuristic_dp(inst, sc, 0, "vertex"), Infeasible)

    # pinning three vertices leaves only the other two as candidates
    pinned = heuristic_dp(inst, sc, 1, "vertex", undeletable={0, 1, 2})
    assert pinned.deleted <= {3, 4} and len(pinned.deleted) == 1
    restricted = oracles.brute_minimum_deletion(
        5, inst.graph.edge_list(), [3, 4],
        lambda s: deletion_feasible(inst, sc, s, "vertex"), 1)
    assert len(restricted) == len(pinned.deleted)

    # contracting the pinned path gives the same answer through a blob
    blob = heuristic_dp(inst, sc, 1, "vertex", undeletable={0, 1, 2})
    assert len(blob.deleted) == 1

    # k=0 on a satisfiable instance returns the empty deletion
    sat, sat_sc = encode_oct(path(2))
    empty = heuristic_dp(sat, sat_sc, 0, "vertex")
    assert empty.deleted == frozenset()


def test_dp_invariant_under_td_choice():
    spider = Graph(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
    branch = TreeDecomposition(
        [-1, 0, 0, 0],
        [frozenset({0}), frozenset({0, 1, 2}),
         frozenset({0, 3, 4}), frozenset({0, 5, 6})],
    )
    flat = TreeDecomposition([-1], [frozenset(range(7))])
    for make, arg in ((encode_coc, 2), (encode_multiway, [2, 4, 6])):
        inst, sc = make(spider, arg)
        target, q = contract_set(spider, set())
        for k in range(0, 3):
            answers = [
                dp_delete(inst, sc, branch, q, k, "vertex"),
                dp_delete(inst, sc, flat, q, k, "vertex"),
                dp_delete(inst, sc, upper_bound(target)[1], q, k, "vertex"),
            ]
            kinds = {isinstance(a, DeletionSolution) for a in answers}
            assert len(kinds) == 1
            if kinds == {True}:
                sizes = {len(a.deleted) for a in answers}
                assert len(sizes) == 1


def test_dp_matches_brute_on_random():
    rng = random.Random(11)
    for trial in range(25):
        g = random_connected(rng, rng.randint(4, 9), rng.randint(0, 3))
        if len(g.edges) > 18:
            continue
        k = rng.randint(0, 3)
        problems = [
            encode_oct(g),
            encode_multiway(g, rng.sample(range(g.n), rng.randint(0, 3))),
            encode_coc(g, rng.randint(1, 3)),
        ]
        for inst, sc in problems:
            for mode in ("vertex", "edge"):
                expect = brute_force(inst, sc, k, mode)
                got = heuristic_dp(inst, sc, k, mode)
                assert isinstance(got, type(expect))
                if isinstance(expect, DeletionSolution):
                    assert len(got.deleted) == len(expect.deleted)
                    assert deletion_feasible(inst, sc, got.deleted, mode)


def test_subexp_matches_brute():
    rng = random.Random(19)
    for trial in range(20):
        g = random_connected(rng, rng.randint(4, 8), rng.randint(0, 3))
        if len(g.edges) > 18:
            continue
        k = rng.randint(0, 3)
        rcd = random_partition(rng, g.n, max(1, ceil_sqrt(k)))
        problems = [
            encode_oct(g),
            encode_multiway(g, rng.sample(range(g.n), rng.randint(0, 3))),
            encode_coc(g, rng.randint(1, 3)),
        ]
        for inst, sc in problems:
            for mode in ("vertex", "edge"):
                expect = brute_force(inst, sc, k, mode)
                got = subexp_solve(inst, sc, k, rcd, mode=mode, minimize=True)
                assert isinstance(got, type(expect))
                if isinstance(expect, DeletionSolution):
                    assert len(got.deleted) == len(expect.deleted)
                    assert deletion_feasible(inst, sc, got.deleted, mode)


def test_subexp_grid_planted_odd_cycles():
    emb = grid_with_odd_faces(8, [(9, 10), (33, 34), (53, 54)])
    inst, sc = encode_oct(emb.graph)

    oracle = oracles.brute_minimum_deletion(
        emb.graph.n, emb.graph.edge_list(), range(emb.graph.n),
        lambda s: deletion_feasible(inst, sc, s, "vertex"), 3)
    assert oracle == {9, 33, 53}

    rcd = decompose_embedded(emb, 2, frozenset())
    sol = subexp_solve(inst, sc, 3, rcd)
    assert sol.deleted == frozenset({9, 34, 53})
    assert deletion_feasible(inst, sc, sol.deleted, "vertex")
    assert isinstance(subexp_solve(inst, sc, 2, rcd), Infeasible)


def test_subexp_decision_exits_early():
    # two triangles sharing vertex 2: the lone optimum is the shared vertex
    bow = Graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    inst, sc = encode_oct(bow)
    rcd = Rcd(2, [frozenset({2}), frozenset({0, 1, 3, 4})], frozenset())

    # the empty guess on the first class pins vertex 2, so the decision
    # search settles for a two-vertex answer found there
    dec = subexp_solve(inst, sc, 2, rcd)
    assert dec.deleted == frozenset({1, 3})
    best = subexp_solve(inst, sc, 2, rcd, minimize=True)
    assert best.deleted == frozenset({2})
    assert len(brute_force(inst, sc, 2, "vertex").deleted) == 1


def test_edge_mode_star_multiway():
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    inst, sc = encode_multiway(star, [1, 2, 3])

    sol = brute_force(inst, sc, 2, "edge")
    assert sol.deleted == frozenset({0, 1})
    assert isinstance(brute_force(inst, sc, 1, "edge"), Infeasible)

    rcd = Rcd(2, [frozenset({0, 1}), frozenset({2, 3})], frozenset())
    pipe = subexp_solve(inst, sc, 2, rcd, mode="edge")
    assert pipe.deleted == frozenset({1, 2})
    assert deletion_feasible(inst, sc, pipe.deleted, "edge")


def test_coc_edge_deletes_satisfied_constraints():
    # every relation accepts, so edge deletions only ever split components
    inst, sc = encode_coc(path(4), 1)
    assert isinstance(heuristic_dp(inst, sc, 2, "edge"), Infeasible)
    sol = heuristic_dp(inst, sc, 3, "edge")
    assert sol.deleted == frozenset({0, 1, 2})
    assert brute_force(inst, sc, 3, "edge").deleted == frozenset({0, 1, 2})


def test_undeletable_blob_keeps_propagated_states():
    inst, sc = encode_oct(cycle(6))
    assert component_assignments(inst, [0, 1, 2]) == (
        {0: 0, 1: 1, 2: 0},
        {0: 1, 1: 0, 2: 1},
    )
    target, q = contract_set(inst.graph, {0, 1, 2})
    assert q.classes() == [(0, 1, 2), (3,), (4,), (5,)]
    td = upper_bound(target)[1]
    sol = dp_delete(inst, sc, td, q, 0, "vertex", undeletable={0, 1, 2})
    assert sol.deleted == frozenset()


def test_validator_rejects_non_permutation():
    with pytest.raises(ValueError, match="value 0 with two partners"):
        PermCspInstance(2, 2, [(0, 1, [(0, 0), (0, 1)])])
    with pytest.raises(ValueError, match="two values with 0"):
        PermCspInstance(2, 2, [(0, 1, [(0, 0), (1, 0)])])
    with pytest.raises(ValueError, match="to itself"):
        PermCspInstance(2, 2, [(1, 1, [(0, 0)])])
    with pytest.raises(ValueError, match="out of range"):
        PermCspInstance(2, 2, [(0, 5, [(0, 0)])])
    with pytest.raises(ValueError, match="outside the domain"):
        PermCspInstance(2, 2, [(0, 1, [(0, 7)])])
    with pytest.raises(ValueError, match="at least one value"):
        PermCspInstance(2, 0, [])


def test_constraint_and_solution_validation():
    with pytest.raises(ValueError, match="nonnegative"):
        SizeConstraint({}, -1)
    with pytest.raises(ValueError, match="nonnegative"):
        SizeConstraint({(0, 0): -2}, 0)
    sc = SizeConstraint({(0, 0): 2, (1, 1): 0, (1, 0): 2}, 3)
    assert sc.weights == {(0, 0): 2, (1, 0): 2}
    assert sc.weight(1, 1) == 0
    assert sc.respected({0: 0, 1: 1})
    assert not sc.respected({0: 0, 1: 0})

    with pytest.raises(ValueError, match="exceeds the budget"):
        DeletionSolution("vertex", {0, 1}, 1)
    with pytest.raises(ValueError, match="mode must be"):
        DeletionSolution("face", set(), 1)
    with pytest.raises(ValueError, match="mode must be"):
        Infeasible("face", 1)
    with pytest.raises(ValueError, match="mode must be"):
        deletion_feasible(PermCspInstance(1, 1, []), SizeConstraint({}, 0), set(), "face")


def test_minus_operations():
    inst, _ = encode_oct(Graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]))
    sub, kept = inst.minus_variables({2})
    assert kept == (0, 1, 3, 4)
    assert sub.n == 4 and sorted(sub.graph.edges) == [(0, 1), (2, 3)]

    fewer = inst.minus_constraints({0, 5})
    assert fewer.n == inst.n and len(fewer.constraints) == 4

    with pytest.raises(ValueError, match="out of range"):
        inst.minus_variables({9})
    with pytest.raises(ValueError, match="out of range"):
        inst.minus_constraints({40})


def test_pipeline_input_validation():
    inst, sc = encode_oct(cycle(5))
    with pytest.raises(ValueError, match="expected p=2"):
        subexp_solve(inst, sc, 2, Rcd(1, [frozenset(range(5))], frozenset()))
    with pytest.raises(ValueError, match="does not fit"):
        subexp_solve(inst, sc, 1, Rcd(1, [frozenset({7})], frozenset()))
    with pytest.raises(ValueError, match="nonnegative"):
        subexp_solve(inst, sc, -1, Rcd(1, [frozenset(range(5))], frozenset()))

    other, _ = encode_oct(cycle(4))
    target, q = contract_set(other.graph, set())
    td = upper_bound(target)[1]
    with pytest.raises(ValueError, match="does not start from the instance graph"):
        dp_delete(inst, sc, td, q, 1, "vertex")
    target5, q5 = contract_set(inst.graph, set())
    with pytest.raises(ValueError, match="not valid for the contracted graph"):
        dp_delete(inst, sc, TreeDecomposition([-1], [frozenset({0})]), q5, 1, "vertex")
    with pytest.raises(ValueError, match="undeletable variable"):
        dp_delete(inst, sc, upper_bound(target5)[1], q5, 1, "vertex", undeletable={9})
    with pytest.raises(ValueError, match="limited to 14 variables"):
        brute_force(*encode_oct(Graph(15, [])), 1, "vertex")
    big, big_sc = encode_oct(complete(7))
    with pytest.raises(ValueError, match="limited to 18 constraints"):
        brute_force(big, big_sc, 1, "edge")


def test_json_round_trips():
    inst, sc = encode_multiway(path(4), [0, 3])
    again = PermCspInstance.from_json(inst.to_json())
    assert again.n == inst.n and again.d == inst.d
    assert again.constraints == inst.constraints
    assert SizeConstraint.from_json(sc.to_json()).weights == sc.weights

    sol = DeletionSolution("edge", {2, 0}, 3)
    data = sol.to_json()
    assert data == {"feasible": True, "mode": "edge", "deleted": [0, 2], "k": 3}
    back = DeletionSolution.from_json(data)
    assert back.deleted == sol.deleted and back.mode == "edge"
    assert Infeasible("vertex", 2).to_json() == {"feasible": False, "mode": "vertex", "k": 2}
