"""Rotation-system embeddings of graphs in orientable surfaces.

An embedding is a graph plus, at every vertex, a cyclic order of outgoing
darts.  Faces are the orbits of the next-dart rule: follow a dart, flip it,
and continue with the successor of the flipped dart in the rotation at its
head.  Isolated vertices each contribute one face of their own.  The genus
comes from the Euler relation #V - #E + #F = 2*#components - 2*genus, which
treats each connected component as embedded in its own surface.

Deleting vertices or edges merges faces.  The merge classes ("regions") are
tracked with a union-find over faces and deleted vertices, which is how the
outer face survives restriction: the new outer region is the class holding
the old outer face.  A region whose boundary is disconnected is singular.

The distinguished outer face stands for the reference point of a pointed
embedding.  Radial layering peels vertices by their vertex-face distance to
the outer face: layer i holds the vertices at distance 2i-1.
"""

from __future__ import annotations

import heapq
from typing import NamedTuple

from .graphs import Graph, components


class Dart(NamedTuple):
    """Directed half of an edge: (edge id, endpoint bit of the tail)."""

    edge: int
    end: int

    def reverse(self):
        return Dart(self.edge, 1 - self.end)


class FaceBoundary:
    """The boundary subgraph of a face or merged region.

    Vertex and edge sets carry whatever id space the producing call used
    (embedding-local or original ids for peeled boundaries).
    """

    __slots__ = ("face", "vertices", "edges")

    def __init__(self, face, vertices, edges):
        self.face = face
        self.vertices = frozenset(vertices)
        self.edges = frozenset((u, v) if u < v else (v, u) for u, v in edges)

    def components(self):
        """Connected components of the boundary subgraph, sorted lists."""
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        out = []
        seen = set()
        for v in sorted(self.vertices):
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            out.append(sorted(comp))
        return out

    def __repr__(self):
        return "FaceBoundary(face=%r, |V|=%d, |E|=%d)" % (self.face, len(self.vertices), len(self.edges))


def is_singular(fb):
    """A face is singular when its boundary is disconnected."""
    return len(fb.components()) >= 2


class RadialLayering:
    """Partition of the vertices by vertex-face distance to the outer face."""

    __slots__ = ("layers", "index")

    def __init__(self, layers):
        self.layers = tuple(frozenset(layer) for layer in layers)
        index = {}
        for i, layer in enumerate(self.layers, start=1):
            for v in layer:
                index[v] = i
        self.index = index

    @property
    def depth(self):
        return len(self.layers)

    def layer(self, i):
        return self.layers[i - 1]

    def at_least(self, a):
        out = set()
        for i in range(a, self.depth + 1):
            out |= self.layers[i - 1]
        return frozenset(out)

    def above(self, a):
        return self.at_least(a + 1)

    def at_most(self, a):
        out = set()
        for i in range(1, min(a, self.depth) + 1):
            out |= self.layers[i - 1]
        return frozenset(out)


class Embedding:
    """Immutable embedded graph: rotation system plus a designated outer face.

    Faces and regions are computed at construction.  `regions` maps each
    face id to its region representative (the smallest member face id);
    fresh embeddings have the identity mapping, restrictions carry merges.
    """

    __slots__ = ("graph", "edge_pairs", "rotation", "faces", "face_vertex_sets",
                 "genus", "outer_face", "regions", "_face_of_dart", "_layering")

    def __init__(self, graph, rotation, outer_face, regions=None):
        self.graph = graph
        self.edge_pairs = tuple(graph.edge_list())
        edge_index = {e: i for i, e in enumerate(self.edge_pairs)}
        if len(rotation) != graph.n:
            raise ValueError("rotation must list every vertex")

        rot = []
        seen_darts = set()
        for v in range(graph.n):
            row = []
            for d in rotation[v]:
                d = Dart(int(d[0]), int(d[1]))
                if not (0 <= d.edge < len(self.edge_pairs)) or d.end not in (0, 1):
                    raise ValueError("malformed dart %r" % (d,))
                if self.edge_pairs[d.edge][d.end] != v:
                    raise ValueError("dart %r does not leave vertex %d" % (d, v))
                if d in seen_darts:
                    raise ValueError("duplicated dart %r" % (d,))
                seen_darts.add(d)
                row.append(d)
            rot.append(tuple(row))
        if len(seen_darts) != 2 * len(self.edge_pairs):
            raise ValueError("rotation is missing darts")
        self.rotation = tuple(rot)

        succ = {}
        for v in range(graph.n):
            row = self.rotation[v]
            for i, d in enumerate(row):
                succ[d] = row[(i + 1) % len(row)]

        face_of_dart = {}
        faces = []
        for start in sorted(seen_darts):
            if start in face_of_dart:
                continue
            walk = []
            d = start
            while True:
                face_of_dart[d] = len(faces)
                walk.append(d)
                d = succ[d.reverse()]
                if d == start:
                    break
            faces.append(tuple(walk))
        face_vertex_sets = [frozenset(self.dart_tail(d) for d in walk) for walk in faces]
        for v in range(graph.n):
            if not self.rotation[v]:
                faces.append(())
                face_vertex_sets.append(frozenset([v]))
        self.faces = tuple(faces)
        self.face_vertex_sets = tuple(face_vertex_sets)
        self._face_of_dart = face_of_dart

        ncomp = len(components(graph))
        euler = 2 * ncomp - graph.n + len(self.edge_pairs) - len(self.faces)
        if euler % 2 != 0 or euler < 0:
            raise ValueError("rotation system is inconsistent: Euler defect %d" % euler)
        self.genus = euler // 2

        if self.faces:
            if not (0 <= outer_face < len(self.faces)):
                raise ValueError("outer face %r out of range" % (outer_face,))
        elif outer_face is not None:
            raise ValueError("empty embedding cannot have an outer face")

        if regions is None:
            regions = tuple(range(len(self.faces)))
        else:
            regions = tuple(regions)
            if len(regions) != len(self.faces):
                raise ValueError("regions must label every face")
            for f, r in enumerate(regions):
                if regions[r] != r or r > f:
                    raise ValueError("region labels must point at smallest member")
        self.regions = regions
        self.outer_face = self.regions[outer_face] if outer_face is not None else None
        self._layering = None

    # -- basic accessors ---------------------------------------------------

    def dart_tail(self, d):
        return self.edge_pairs[d.edge][d.end]

    def dart_head(self, d):
        return self.edge_pairs[d.edge][1 - d.end]

    @property
    def n_faces(self):
        return len(self.faces)

    def region_ids(self):
        return sorted(set(self.regions))

    def region_members(self, r):
        return [f for f, rr in enumerate(self.regions) if rr == r]

    def face_of_dart(self, d):
        return self._face_of_dart[d]

    def region_of_dart(self, d):
        return self.regions[self._face_of_dart[d]]

    def region_boundary(self, r):
        """Boundary of the merged region r as a FaceBoundary in local ids."""
        if self.regions[r] != r:
            r = self.regions[r]
        verts = set()
        edges = set()
        for f in self.region_members(r):
            verts |= self.face_vertex_sets[f]
            for d in self.faces[f]:
                edges.add(self.edge_pairs[d.edge])
        return FaceBoundary(r, verts, edges)

    def vertex_region_incidence(self):
        """Map vertex -> sorted region reps whose boundary contains it."""
        out = {v: set() for v in range(self.graph.n)}
        for f in range(len(self.faces)):
            r = self.regions[f]
            for v in self.face_vertex_sets[f]:
                out[v].add(r)
        return {v: sorted(rs) for v, rs in out.items()}

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "graph": self.graph.to_json(),
            "rotation": [[[d.edge, d.end] for d in row] for row in self.rotation],
            "outer_face": self.outer_face,
            "regions": list(self.regions),
        }

    @classmethod
    def from_json(cls, obj):
        return cls(Graph.from_json(obj["graph"]), obj["rotation"], obj["outer_face"],
                   obj.get("regions"))

    def to_dot(self, name="G"):
        """DOT text; vertices get layer annotations when a layering exists."""
        labels = {}
        try:
            lay = radial_layering(self)
            labels = {v: "L%d" % lay.index[v] for v in lay.index}
        except ValueError:
            pass
        lines = ["graph %s {" % name]
        for v in range(self.graph.n):
            if v in labels:
                lines.append('  %d [label="%d (%s)"];' % (v, v, labels[v]))
            else:
                lines.append("  %d;" % v)
        for u, v in self.graph.edge_list():
            lines.append("  %d -- %d;" % (u, v))
        lines.append("}")
        return "\n".join(lines)


def trace_faces(emb):
    """Face walks and genus of an embedding (already computed at build)."""
    return list(emb.faces), emb.genus


# -- restriction with region tracking ---------------------------------------


class Restriction(NamedTuple):
    """A sub-embedding plus the bookkeeping linking it to its parent."""

    embedding: Embedding
    order: tuple            # new vertex id -> parent vertex id
    region_map: dict        # parent region rep -> new region rep (survivors)

    def to_parent(self, vertices):
        return frozenset(self.order[v] for v in vertices)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        while p != self.parent[p]:
            self.parent[p] = self.parent[self.parent[p]]
            p = self.parent[p]
        root = p
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def restrict(emb, keep_vertices, keep_edges=None):
    """Sub-embedding on the given vertices (and optionally edge subset).

    Rotation rows are filtered, faces are retraced, and the parent's
    regions are merged across every deleted edge and around every deleted
    vertex.  The new outer face is the region holding the parent's outer
    face, or region of face 0 when that region lost all its faces.
    """
    keep_vertices = set(keep_vertices)
    if keep_edges is None:
        keep_edges = {e for e in emb.edge_pairs if e[0] in keep_vertices and e[1] in keep_vertices}
    else:
        keep_edges = {(u, v) if u < v else (v, u) for u, v in keep_edges}
        for u, v in keep_edges:
            if u not in keep_vertices or v not in keep_vertices:
                raise ValueError("kept edge (%d, %d) has a deleted endpoint" % (u, v))

    order = sorted(keep_vertices)
    new_id = {v: i for i, v in enumerate(order)}
    new_graph = Graph(len(order), [(new_id[u], new_id[v]) for u, v in keep_edges])

    kept_edge_idx = {e for e, pair in enumerate(emb.edge_pairs) if pair in keep_edges}
    new_edge_index = {pair: i for i, pair in enumerate(new_graph.edge_list())}

    def translate(d):
        u, v = emb.edge_pairs[d.edge]
        nu, nv = new_id[u], new_id[v]
        pair = (nu, nv) if nu < nv else (nv, nu)
        tail = new_id[emb.dart_tail(d)]
        return Dart(new_edge_index[pair], pair.index(tail))

    rotation = []
    for v in order:
        rotation.append([translate(d) for d in emb.rotation[v] if d.edge in kept_edge_idx])

    uf = _UnionFind()
    for e, pair in enumerate(emb.edge_pairs):
        if e in kept_edge_idx:
            continue
        r0 = emb.region_of_dart(Dart(e, 0))
        r1 = emb.region_of_dart(Dart(e, 1))
        uf.union(("r", r0), ("r", r1))
    for v in range(emb.graph.n):
        if v in keep_vertices:
            continue
        if emb.rotation[v]:
            for d in emb.rotation[v]:
                uf.union(("v", v), ("r", emb.region_of_dart(d)))
        else:
            iso_face = next(f for f in range(emb.n_faces)
                            if not emb.faces[f] and v in emb.face_vertex_sets[f])
            uf.union(("v", v), ("r", emb.regions[iso_face]))

    if new_graph.n == 0:
        empty = Embedding(new_graph, [], None)
        return Restriction(empty, tuple(order), {})
    probe = Embedding(new_graph, rotation, 0)

    # map each new face to a parent region root
    old_edge_index = {pair: e for e, pair in enumerate(emb.edge_pairs)}
    root_of_new_face = []
    for f in range(probe.n_faces):
        walk = probe.faces[f]
        if walk:
            d = walk[0]
            pair = probe.edge_pairs[d.edge]
            old_pair = (order[pair[0]], order[pair[1]])
            old_e = old_edge_index[old_pair]
            old_d = Dart(old_e, d.end if emb.edge_pairs[old_e][d.end] == order[probe.dart_tail(d)] else 1 - d.end)
            root_of_new_face.append(uf.find(("r", emb.region_of_dart(old_d))))
        else:
            v_old = order[next(iter(probe.face_vertex_sets[f]))]
            if emb.rotation[v_old]:
                anchor = uf.find(("r", emb.region_of_dart(emb.rotation[v_old][0])))
            else:
                iso_face = next(ff for ff in range(emb.n_faces)
                                if not emb.faces[ff] and v_old in emb.face_vertex_sets[ff])
                anchor = uf.find(("r", emb.regions[iso_face]))
            root_of_new_face.append(anchor)

    rep_of_root = {}
    regions = []
    for f, root in enumerate(root_of_new_face):
        rep_of_root.setdefault(root, f)
        regions.append(rep_of_root[root])

    region_map = {}
    for r in emb.region_ids():
        root = uf.find(("r", r))
        if root in rep_of_root:
            region_map[r] = rep_of_root[root]

    outer = region_map.get(emb.outer_face) if emb.outer_face is not None else None
    if outer is None:
        outer = regions[0]
    final = Embedding(new_graph, rotation, outer, regions)
    return Restriction(final, tuple(order), region_map)


def induced_embedding(emb, s):
    """Embedding induced on the vertex set s; regions track face merges."""
    for v in s:
        if not (0 <= v < emb.graph.n):
            raise ValueError("vertex %d out of range" % v)
    return restrict(emb, s).embedding


# -- vertex-face incidence, distances, layering ------------------------------


def _vf_neighbors(emb):
    """Adjacency of the vertex/region incidence graph on tagged nodes."""
    adj = {("v", v): set() for v in range(emb.graph.n)}
    for r in emb.region_ids():
        adj[("f", r)] = set()
    for f in range(emb.n_faces):
        r = emb.regions[f]
        for v in emb.face_vertex_sets[f]:
            adj[("v", v)].add(("f", r))
            adj[("f", r)].add(("v", v))
    return adj


def _as_node(emb, x):
    if not (isinstance(x, tuple) and len(x) == 2 and x[0] in ("v", "f")):
        raise ValueError("vertex-or-face must be tagged ('v', id) or ('f', id)")
    kind, i = x
    if kind == "v":
        if not (0 <= i < emb.graph.n):
            raise ValueError("vertex %r not in the embedding" % (i,))
        return ("v", i)
    if not (0 <= i < emb.n_faces):
        raise ValueError("face %r not in the embedding" % (i,))
    return ("f", emb.regions[i])


def weighted_vf_distance(emb, w, a, b):
    """Minimum cost of a vertex-face alternating path from a to b.

    Cost is the number of hops plus the weights of every face on the path,
    endpoints included.  With all weights zero this is the plain incidence
    distance; from a face to itself the distance is the face's own weight.
    """
    wreg = {}
    for f, wt in (w or {}).items():
        if wt < 0:
            raise ValueError("face weights must be nonnegative")
        r = emb.regions[f]
        wreg[r] = max(wreg.get(r, 0), wt)

    src = _as_node(emb, a)
    dst = _as_node(emb, b)
    adj = _vf_neighbors(emb)

    def node_weight(x):
        return wreg.get(x[1], 0) if x[0] == "f" else 0

    dist = {src: node_weight(src)}
    heap = [(dist[src], src)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist.get(x, float("inf")):
            continue
        if x == dst:
            return d
        for y in adj[x]:
            nd = d + 1 + node_weight(y)
            if nd < dist.get(y, float("inf")):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    raise ValueError("no vertex-face path between %r and %r" % (a, b))


def weighted_vf_diameter(emb, w):
    """Maximum weighted distance over all vertex and face pairs."""
    nodes = [("v", v) for v in range(emb.graph.n)] + [("f", r) for r in emb.region_ids()]
    best = 0
    for x in nodes:
        for y in nodes:
            best = max(best, weighted_vf_distance(emb, w, x, y))
    return best


def radial_layering(emb):
    """Layers of vertices by distance to the outer face: L_i at 2i-1.

    Computed by BFS in the incidence graph and cross-checked against the
    peeling definition: L_i must equal the outer-face boundary of the
    embedding induced on the not-yet-peeled vertices.
    """
    if emb._layering is not None:
        return emb._layering
    if emb.graph.n == 0:
        raise ValueError("layering of an empty embedding")
    adj = _vf_neighbors(emb)
    src = ("f", emb.outer_face)
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    layers = {}
    for v in range(emb.graph.n):
        d = dist.get(("v", v))
        if d is None:
            raise ValueError("vertex %d unreachable from the outer face (disconnected)" % v)
        assert d % 2 == 1
        layers.setdefault((d + 1) // 2, set()).add(v)
    m = max(layers)
    assert sorted(layers) == list(range(1, m + 1))
    result = RadialLayering([layers[i] for i in range(1, m + 1)])

    # peeling cross-check: the same layers must fall out of repeated
    # outer-boundary removal
    res = Restriction(emb, tuple(range(emb.graph.n)), {r: r for r in emb.region_ids()})
    for i in range(1, m + 1):
        cur = res.embedding
        boundary = cur.region_boundary(cur.outer_face)
        peeled_layer = res.to_parent(boundary.vertices)
        if peeled_layer != result.layer(i):
            raise AssertionError("layering mismatch at layer %d: BFS %r vs peel %r"
                                 % (i, sorted(result.layer(i)), sorted(peeled_layer)))
        keep = set(range(cur.graph.n)) - set(boundary.vertices)
        if not keep:
            if i != m:
                raise AssertionError("peeling exhausted early at layer %d" % i)
            break
        inner = restrict(cur, keep)
        res = Restriction(inner.embedding,
                          tuple(res.order[v] for v in inner.order),
                          inner.region_map)
    emb._layering = result
    return result


def peeled_outer_face(emb, t):
    """Outer face o_t of the embedding induced on layers >= t.

    Returns (face id in the peeled embedding, boundary in original ids).
    The boundary must equal layer t exactly; any mismatch means region
    tracking went inconsistent and is raised as an error.
    """
    lay = radial_layering(emb)
    if not (1 <= t <= lay.depth):
        raise ValueError("layer index %d out of range 1..%d" % (t, lay.depth))
    res = restrict(emb, lay.at_least(t))
    sub = res.embedding
    o_t = sub.outer_face
    boundary = sub.region_boundary(o_t)
    verts = res.to_parent(boundary.vertices)
    if verts != lay.layer(t):
        raise RuntimeError("region tracking inconsistent at layer %d: boundary %r != L_t %r"
                           % (t, sorted(verts), sorted(lay.layer(t))))
    edges = frozenset((res.order[u], res.order[v]) for u, v in boundary.edges)
    return o_t, FaceBoundary(o_t, verts, edges)


def is_minimal(emb):
    """Whether every face's boundary components stay face-separated.

    For each face o and each region f of the boundary sub-embedding other
    than o itself, the vertices of f's boundary must lie inside a single
    connected component of the boundary of o.
    """
    for o in emb.region_ids():
        fb = emb.region_boundary(o)
        comps = fb.components()
        if len(comps) <= 1:
            continue
        comp_of = {}
        for ci, comp in enumerate(comps):
            for v in comp:
                comp_of[v] = ci
        res = restrict(emb, fb.vertices, fb.edges)
        sub = res.embedding
        o_sub = res.region_map.get(o)
        for r in sub.region_ids():
            if r == o_sub:
                continue
            verts = res.to_parent(sub.region_boundary(r).vertices)
            if len({comp_of[v] for v in verts}) > 1:
                return False
    return True
