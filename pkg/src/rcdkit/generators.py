"""Instance generators: grids, subdivided grids, apex grids, random planar
embeddings, and clique-sum inputs.

Everything is deterministic given the seed.  Planar instances come out as
rotation-system embeddings with a designated outer face; the random family
starts from a stacked triangulation of the sphere and applies seeded edge
deletions that keep the graph connected (which, at genus zero, keeps every
face a disk).
"""

from __future__ import annotations

import random

from .graphs import Graph, is_connected
from .embedding import Embedding, restrict


def _grid_graph(m):
    edges = []
    for r in range(m):
        for c in range(m):
            v = r * m + c
            if c + 1 < m:
                edges.append((v, v + 1))
            if r + 1 < m:
                edges.append((v, v + m))
    return Graph(m * m, edges)


def _rotation_from_neighbor_order(g, order):
    """Build rotation rows from per-vertex neighbor sequences."""
    index = {e: i for i, e in enumerate(g.edge_list())}
    rotation = []
    for v in range(g.n):
        row = []
        for u in order[v]:
            pair = (v, u) if v < u else (u, v)
            row.append((index[pair], pair.index(v)))
        rotation.append(row)
    return rotation


def _pick_outer(emb_probe):
    """Longest face walk, smallest id on ties: the unbounded face of the
    canonical drawings used by the generators."""
    best = max(range(emb_probe.n_faces), key=lambda f: (len(emb_probe.faces[f]), -f))
    return best


def grid(m):
    """The m x m grid with its canonical planar embedding.

    Vertices are row-major; the rotation lists neighbors clockwise
    (up, right, down, left); the outer face is the unbounded one.
    """
    if m < 1:
        raise ValueError("grid needs m >= 1")
    g = _grid_graph(m)
    order = []
    for r in range(m):
        for c in range(m):
            nb = []
            if r > 0:
                nb.append((r - 1) * m + c)
            if c + 1 < m:
                nb.append(r * m + c + 1)
            if r + 1 < m:
                nb.append((r + 1) * m + c)
            if c > 0:
                nb.append(r * m + c - 1)
            order.append(nb)
    rotation = _rotation_from_neighbor_order(g, order)
    probe = Embedding(g, rotation, 0)
    return Embedding(g, rotation, _pick_outer(probe))


def subdivided_grid(m):
    """The m x m grid with every edge subdivided once.

    Grid vertices keep their ids; midpoints follow, one per grid edge in
    sorted edge order.
    """
    base = _grid_graph(m)
    base_edges = base.edge_list()
    mid_of = {e: m * m + i for i, e in enumerate(base_edges)}
    edges = []
    for e in base_edges:
        edges.append((e[0], mid_of[e]))
        edges.append((e[1], mid_of[e]))
    g = Graph(m * m + len(base_edges), edges)

    order = [[] for _ in range(g.n)]
    for r in range(m):
        for c in range(m):
            v = r * m + c
            nb = []
            if r > 0:
                nb.append((r - 1) * m + c)
            if c + 1 < m:
                nb.append(r * m + c + 1)
            if r + 1 < m:
                nb.append((r + 1) * m + c)
            if c > 0:
                nb.append(r * m + c - 1)
            for u in nb:
                pair = (v, u) if v < u else (u, v)
                order[v].append(mid_of[pair])
    for e, mid in mid_of.items():
        order[mid] = [e[0], e[1]]
    rotation = _rotation_from_neighbor_order(g, order)
    probe = Embedding(g, rotation, 0)
    return Embedding(g, rotation, _pick_outer(probe))


def _stacked_triangulation(n, rng):
    """Oriented face triples of a random stacked sphere triangulation."""
    faces = [(0, 1, 2), (0, 2, 1)]
    inner = [0]
    edges = {(0, 1), (0, 2), (1, 2)}
    for w in range(3, n):
        fi = inner[rng.randrange(len(inner))]
        a, b, c = faces[fi]
        faces[fi] = (a, b, w)
        faces.append((b, c, w))
        faces.append((c, a, w))
        inner.append(len(faces) - 2)
        inner.append(len(faces) - 1)
        for u in (a, b, c):
            edges.add((min(u, w), max(u, w)))
    return faces, edges


def _rotation_from_oriented_faces(n, faces):
    succ = [dict() for _ in range(n)]
    for a, b, c in faces:
        succ[a][b] = c
        succ[b][c] = a
        succ[c][a] = b
    order = []
    for v in range(n):
        if not succ[v]:
            order.append([])
            continue
        start = min(succ[v])
        cyc = [start]
        while True:
            nxt = succ[v][cyc[-1]]
            if nxt == start:
                break
            cyc.append(nxt)
        assert len(cyc) == len(succ[v]), "inconsistent face orientation at %d" % v
        order.append(cyc)
    return order


def random_planar(n, seed, delete_fraction=0.15):
    """Connected planar embedding on n vertices.

    A seeded stacked triangulation, followed by seeded edge deletions that
    skip bridges.  The outer face starts at the initial triangle and is
    tracked through deletions by region merging.
    """
    if n < 3:
        raise ValueError("random_planar needs n >= 3")
    rng = random.Random(seed)
    faces, edges = _stacked_triangulation(n, rng)
    g = Graph(n, edges)
    rotation = _rotation_from_neighbor_order(g, _rotation_from_oriented_faces(n, faces))
    probe = Embedding(g, rotation, 0)
    emb = Embedding(g, rotation, _initial_outer_face(probe))

    assert emb.genus == 0, "stacked triangulation must be planar"
    candidates = emb.graph.edge_list()
    rng.shuffle(candidates)
    target_deletions = int(delete_fraction * len(candidates))
    deleted = 0
    for e in candidates:
        if deleted >= target_deletions:
            break
        remaining = set(emb.graph.edges) - {e}
        test = Graph(emb.graph.n, remaining)
        if not is_connected(test):
            continue
        res = restrict(emb, range(emb.graph.n), remaining)
        emb = res.embedding
        deleted += 1
    assert emb.genus == 0
    return emb


def _initial_outer_face(probe):
    """The untouched root triangle of a stacked triangulation.

    Stacking always subdivides inner faces, so for n >= 4 exactly one face
    is still a triangle on {0,1,2}; on the bare triangle both faces
    qualify and the first one serves.
    """
    hits = [f for f in range(probe.n_faces)
            if len(probe.faces[f]) == 3 and probe.face_vertex_sets[f] == frozenset({0, 1, 2})]
    assert hits, "stacked triangulation lost its root triangle"
    return hits[0]


def apex_grid(m, a):
    """m x m grid plus `a` universal apex vertices (mutually adjacent too)."""
    from .rcd import ApexStructure

    base = grid(m)
    n = m * m
    edges = set(base.graph.edges)
    apices = list(range(n, n + a))
    for i, x in enumerate(apices):
        for v in range(n):
            edges.add((v, x))
        for y in apices[i + 1:]:
            edges.add((x, y))
    g = Graph(n + a, edges)
    return ApexStructure(g, apices, base, h=a)


def clique_sum(pieces, adhesions):
    """Glue embedded pieces into a clique-sum input along shared apices.

    `pieces` are embeddings; piece 0 roots the tree.  Each adhesion is a
    triple (parent, child, size) with size in 1..3: it creates that many
    fresh apex vertices shared by the two bags, each adjacent to every
    vertex of both pieces.  The shared vertices are apices of both torsos,
    so every adhesion clause holds by construction.
    """
    from .cliquesum import RsInput
    from .rcd import ApexStructure

    if not pieces:
        raise ValueError("need at least one piece")
    offsets = []
    total = 0
    for emb in pieces:
        offsets.append(total)
        total += emb.graph.n

    seen_children = set()
    for parent, child, size in adhesions:
        if not (0 <= parent < len(pieces)) or not (0 < child < len(pieces)):
            raise ValueError("adhesion (%d, %d) out of range" % (parent, child))
        if child in seen_children:
            raise ValueError("piece %d glued twice" % child)
        if not (1 <= size <= 3):
            raise ValueError("adhesion size must be 1..3, got %d" % size)
        seen_children.add(child)
    if len(seen_children) != len(pieces) - 1:
        raise ValueError("adhesions must glue every piece except the root")

    edges = []
    for emb, off in zip(pieces, offsets):
        edges += [(u + off, v + off) for u, v in emb.graph.edges]
    incident = {i: [] for i in range(len(pieces))}
    parent_of = {0: -1}
    next_id = total
    for parent, child, size in adhesions:
        apx = list(range(next_id, next_id + size))
        next_id += size
        incident[parent] += apx
        incident[child] += apx
        parent_of[child] = parent
        for a in apx:
            for side in (parent, child):
                off = offsets[side]
                edges += [(v + off, a) for v in range(pieces[side].graph.n)]
    g = Graph(next_id, edges)

    from .treedecomp import TreeDecomposition

    bags = []
    for i, (emb, off) in enumerate(zip(pieces, offsets)):
        bags.append(set(range(off, off + emb.graph.n)) | set(incident[i]))
    td = TreeDecomposition([parent_of[i] for i in range(len(pieces))], bags)

    h = max([3] + [len(incident[i]) for i in range(len(pieces))])
    structs = {}
    child_adhesions = {i: [] for i in range(len(pieces))}
    for parent, child, size in adhesions:
        child_adhesions[parent].append(sorted(td.bags[child] & td.bags[parent]))
    for i, (emb, off) in enumerate(zip(pieces, offsets)):
        n = emb.graph.n
        rank = {v: k for k, v in enumerate(sorted(bags[i]))}
        local = [(u, v) for u, v in emb.graph.edges]
        for a in incident[i]:
            local += [(v, rank[a]) for v in range(n)]
        for adh in child_adhesions[i]:
            loc = [rank[a] for a in adh]
            local += [(loc[x], loc[y]) for x in range(len(loc))
                      for y in range(x + 1, len(loc))]
        apices = [rank[a] for a in sorted(incident[i])]
        structs[i] = ApexStructure(Graph(len(bags[i]), local), apices, emb, h)
    return RsInput(g, td, structs, h)


def subdivided_grid_star(m):
    """The subdivided grid with its one-bag-per-edge star decomposition.

    The root bag holds the grid vertices, so the root torso is the plain
    grid with every edge fake; each child bag is one subdivided edge
    {u, v, midpoint} whose torso declares u and v apices around the lone
    embeddable midpoint.
    """
    from .cliquesum import RsInput
    from .rcd import ApexStructure

    emb = subdivided_grid(m)
    base = _grid_graph(m)
    base_edges = base.edge_list()
    n = m * m

    from .treedecomp import TreeDecomposition

    bags = [set(range(n))]
    parent = [-1]
    for j, (u, v) in enumerate(base_edges):
        bags.append({u, v, n + j})
        parent.append(0)
    td = TreeDecomposition(parent, bags)

    point = Embedding(Graph(1, []), [[]], 0)
    structs = {0: ApexStructure(base, [], grid(m), 2)}
    for j, (u, v) in enumerate(base_edges):
        structs[j + 1] = ApexStructure(Graph(3, [(0, 2), (1, 2)]), [0, 1], point, 2)
    return RsInput(emb.graph, td, structs, 2)
