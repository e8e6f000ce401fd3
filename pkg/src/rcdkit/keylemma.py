"""Boundary-pair analysis on a radial layer.

The vertices of layer t form the boundary of the outer face o_t of the
embedding peeled down to layers >= t.  That boundary is itself an embedded
graph, and each pair (inner face f, boundary vertex v) is classified by
where the boundary paths from v that avoid the edges of f can reach:
another vertex of f (singular type I), a singular face's boundary
(singular type II), an exit vertex adjacent to the previous layer
(critical), or none of these (normal).

Legal paths walk the boundary toward an exit without re-entering the face
of a critical pair twice in a row.  Their union X, together with the
reach sets of the normal pairs rooted in X (the layer augmentation
L_t+), is what the decomposition engine later removes from a good layer.

Vertices below are ids of the original embedding; face ids are region ids
of the boundary embedding.  An edge whose two sides both trace o_t has no
inner face and is marked OuterOnly; such edges never constrain legality.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

from .embedding import Dart, is_singular, radial_layering, restrict

SINGULAR_TYPE_I = "SingularTypeI"
SINGULAR_TYPE_II = "SingularTypeII"
CRITICAL = "Critical"
NORMAL = "Normal"
PAIR_CLASSES = (SINGULAR_TYPE_I, SINGULAR_TYPE_II, CRITICAL, NORMAL)

OUTER_ONLY = "OuterOnly"


class SingularFaceError(ValueError):
    """A face incident to the working layer has a disconnected boundary."""


class KeyOutput(NamedTuple):
    """Sets produced for one layer: X, the augmentation, and their witnesses."""

    t: int
    X: frozenset
    Lplus: frozenset
    paths: tuple
    ysets: dict

    def to_json(self):
        return {
            "t": self.t,
            "X": sorted(self.X),
            "Lplus": sorted(self.Lplus),
            "paths": [list(p) for p in self.paths],
            "ysets": [[f, v, sorted(y)] for (f, v), y in sorted(self.ysets.items())],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["t"]), frozenset(obj["X"]), frozenset(obj["Lplus"]),
                   tuple(tuple(p) for p in obj["paths"]),
                   {(f, v): frozenset(y) for f, v, y in obj["ysets"]})


def _norm(u, v):
    return (u, v) if u < v else (v, u)


def exits(emb, t):
    """Vertices of layer t with a neighbor in layer t-1."""
    lay = radial_layering(emb)
    if not 2 <= t <= lay.depth:
        raise ValueError("layer index %d out of range 2..%d" % (t, lay.depth))
    prev = lay.layer(t - 1)
    g = emb.graph
    return frozenset(v for v in lay.layer(t) if any(u in prev for u in g.neighbors(v)))


class LayerBoundary:
    """The embedded boundary of o_t: faces, exits, and pair machinery.

    Built once per (embedding, layer index) and shared by all operations.
    """

    def __init__(self, emb, t):
        lay = radial_layering(emb)
        if not 2 <= t <= lay.depth:
            raise ValueError("layer index %d out of range 2..%d" % (t, lay.depth))
        self.emb = emb
        self.t = t
        self.layer = lay.layer(t)
        self.exits = exits(emb, t)

        peel = restrict(emb, lay.at_least(t))
        o_t = peel.embedding.outer_face
        ob = peel.embedding.region_boundary(o_t)
        sub = restrict(peel.embedding, ob.vertices, ob.edges)
        bemb = sub.embedding
        orig = tuple(peel.order[v] for v in sub.order)
        self.outer = sub.region_map[o_t]

        self.adj = {orig[v]: tuple(sorted(orig[u] for u in bemb.graph.neighbors(v)))
                    for v in range(bemb.graph.n)}
        self.edges = frozenset(_norm(orig[u], orig[v]) for u, v in bemb.graph.edge_list())

        self.inner = tuple(r for r in bemb.region_ids() if r != self.outer)
        self.face_vertices = {}
        self.face_edges = {}
        self.singular = set()
        for f in self.inner:
            fb = bemb.region_boundary(f)
            self.face_vertices[f] = frozenset(orig[v] for v in fb.vertices)
            self.face_edges[f] = frozenset(_norm(orig[u], orig[v]) for u, v in fb.edges)
            if is_singular(fb):
                self.singular.add(f)
        self.singular = frozenset(self.singular)

        self.edge_face = {}
        for e, (u, v) in enumerate(bemb.edge_pairs):
            r0 = bemb.region_of_dart(Dart(e, 0))
            r1 = bemb.region_of_dart(Dart(e, 1))
            if self.outer not in (r0, r1):
                raise AssertionError("boundary edge with no side on the outer face")
            side = r1 if r0 == self.outer else r0
            self.edge_face[_norm(orig[u], orig[v])] = OUTER_ONLY if side == self.outer else side

        self._classes = {}
        self._reach_sets = {}
        self._hypothesis = None

    # -- lemma hypothesis ----------------------------------------------------

    def require_hypothesis(self):
        """Fail unless every face incident to the layer is non-singular."""
        if self._hypothesis is None:
            self._hypothesis = True
            for r in self.emb.region_ids():
                fb = self.emb.region_boundary(r)
                if fb.vertices & self.layer and is_singular(fb):
                    self._hypothesis = r
                    break
        if self._hypothesis is not True:
            raise SingularFaceError("face %d incident to layer %d has a disconnected boundary"
                                    % (self._hypothesis, self.t))

    # -- pair classification ---------------------------------------------------

    def check_pair(self, f, v):
        if f not in self.face_vertices:
            raise ValueError("face %r is not an inner face of the layer boundary" % (f,))
        if v not in self.face_vertices[f]:
            raise ValueError("vertex %d is not on the boundary of face %d" % (v, f))

    def reach(self, f, v):
        """Vertices reachable from v along boundary edges avoiding face f's."""
        self.check_pair(f, v)
        key = (f, v)
        if key not in self._reach_sets:
            avoid = self.face_edges[f]
            seen = {v}
            stack = [v]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y not in seen and _norm(x, y) not in avoid:
                        seen.add(y)
                        stack.append(y)
            self._reach_sets[key] = frozenset(seen)
        return self._reach_sets[key]

    def pair_class(self, f, v):
        self.require_hypothesis()
        key = (f, v)
        if key not in self._classes:
            y = self.reach(f, v)
            if y & (self.face_vertices[f] - {v}):
                cls = SINGULAR_TYPE_I
            elif any(y & self.face_vertices[fp] for fp in self.singular if fp != f):
                cls = SINGULAR_TYPE_II
            elif y & self.exits:
                cls = CRITICAL
            else:
                cls = NORMAL
            self._classes[key] = cls
        return self._classes[key]

    def singular_count(self, f):
        """Number of boundary vertices of f forming a singular pair with it."""
        return sum(1 for v in self.face_vertices[f]
                   if self.pair_class(f, v) in (SINGULAR_TYPE_I, SINGULAR_TYPE_II))

    # -- legal paths -----------------------------------------------------------

    def exit_path(self, v, avoid=frozenset()):
        """Shortest boundary path from v to an exit avoiding the given edges.

        Breadth-first with smallest-id tie-breaks; None if no exit is
        reachable.  The path touches an exit only at its last vertex.
        """
        if v in self.exits:
            return (v,)
        parent = {v: None}
        frontier = [v]
        found = None
        while frontier and found is None:
            nxt = []
            for x in sorted(frontier):
                for y in self.adj[x]:
                    if y in parent or _norm(x, y) in avoid:
                        continue
                    parent[y] = x
                    nxt.append(y)
            hits = sorted(set(nxt) & self.exits)
            if hits:
                found = hits[0]
            frontier = nxt
        if found is None:
            return None
        path = [found]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])
        return tuple(reversed(path))

    def first_violation(self, path):
        """Smallest index where the path re-enters the face of a critical pair."""
        for i in range(1, len(path) - 1):
            f = self.edge_face[_norm(path[i - 1], path[i])]
            if f == OUTER_ONLY:
                continue
            if self.pair_class(f, path[i]) == CRITICAL \
                    and self.edge_face[_norm(path[i], path[i + 1])] == f:
                return i
        return None

    def legal_path(self, v):
        """Simple legal path from v to an exit, by iterative re-routing.

        Each round fixes the first legality violation: the violating vertex
        forms a critical pair with the face just walked along, so an exit
        is reachable from it without that face's edges, and the shortest
        such detour replaces the rest of the path.  The fixed prefix only
        grows, so at most |layer| rounds happen.
        """
        self.require_hypothesis()
        if v not in self.layer:
            raise ValueError("vertex %d is not in layer %d" % (v, self.t))
        path = self.exit_path(v)
        if path is None:
            raise ValueError("no exit reachable from vertex %d along the boundary of layer %d"
                             " (disconnected boundary without the non-singular hypothesis?)"
                             % (v, self.t))
        for _ in range(len(self.layer) + 1):
            i = self.first_violation(path)
            if i is None:
                assert len(set(path)) == len(path)
                return path
            f = self.edge_face[_norm(path[i - 1], path[i])]
            tail = self.exit_path(path[i], avoid=self.face_edges[f])
            assert tail is not None, "critical pair without a reachable exit"
            upgraded = path[:i] + tail
            assert len(set(upgraded)) == len(upgraded), "re-routing lost simplicity"
            path = upgraded
        raise AssertionError("legality upgrading did not settle within %d rounds" % len(self.layer))


@lru_cache(maxsize=32)
def layer_boundary(emb, t):
    """Shared LayerBoundary for (emb, t); embeddings are immutable."""
    return LayerBoundary(emb, t)


def face_side(emb, t, e):
    """Inner face on the non-outer side of boundary edge e, or OuterOnly."""
    b = layer_boundary(emb, t)
    e = _norm(int(e[0]), int(e[1]))
    if e not in b.edge_face:
        raise ValueError("edge %r is not on the boundary of layer %d" % (e, t))
    return b.edge_face[e]


def classify_pair(emb, t, f, v):
    """Class of the pair (inner face f, boundary vertex v)."""
    b = layer_boundary(emb, t)
    b.check_pair(f, v)
    return b.pair_class(f, v)


def y_set(emb, t, f, v):
    """Reach set Y of the pair (f, v); normal pairs get their properties checked."""
    b = layer_boundary(emb, t)
    y = b.reach(f, v)
    if b.pair_class(f, v) == NORMAL:
        assert not y & b.exits
        assert y & b.face_vertices[f] == {v}
        for fp in b.inner:
            if fp != f:
                cut = y & b.face_vertices[fp]
                assert not cut or cut == b.face_vertices[fp]
    return y


def legal_path(emb, t, v):
    """Simple legal boundary path from v to an exit of layer t."""
    return layer_boundary(emb, t).legal_path(v)


def compute_key_sets(emb, t, phi, c=None, check=True):
    """Construct X and the augmentation for layer t around the seed set phi.

    X is the union of one legal path per seed vertex; the augmentation
    collects the reach sets of all normal pairs rooted in X.  With check
    on, the full condition report is computed and must pass.
    """
    b = layer_boundary(emb, t)
    b.require_hypothesis()
    phi = frozenset(phi)
    if not phi <= b.layer:
        raise ValueError("phi must be a subset of layer %d" % t)
    if c is None:
        c = len(phi)
    elif c < len(phi):
        raise ValueError("c must be at least |phi|")

    paths = tuple(b.legal_path(v) for v in sorted(phi))
    x = frozenset(v for p in paths for v in p)
    ysets = {}
    for f in b.inner:
        for v in sorted(b.face_vertices[f] & x):
            if b.pair_class(f, v) == NORMAL:
                ysets[(f, v)] = y_set(emb, t, f, v)
    lplus = frozenset(u for y in ysets.values() for u in y)
    out = KeyOutput(t=t, X=x, Lplus=lplus, paths=paths, ysets=ysets)
    if check:
        report = verify_key_conditions(emb, t, out, c=c)
        if not report["ok"]:
            raise AssertionError("key set construction failed verification: %s"
                                 % "; ".join(report["witnesses"]))
    return out


def _components_within(g, verts):
    """Connected components of g restricted to verts, as frozensets."""
    verts = set(verts)
    seen = set()
    out = []
    for v in sorted(verts):
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y in g.neighbors(x):
                if y in verts and y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        out.append(frozenset(comp))
    return out


def _neighborhood(g, s):
    return {y for x in s for y in g.neighbors(x)} - set(s)


def verify_key_conditions(emb, t, out, c=None):
    """Check a KeyOutput against the four conditions and the set properties.

    Condition (2) is checked on the instance consumed downstream: the graph
    induced on the augmentation plus all deeper layers.  Conditions (3)
    and (4) compare against concrete genus-0 bounds; on positive-genus
    inputs the counts are only recorded.
    """
    b = layer_boundary(emb, t)
    b.require_hypothesis()
    g = emb.graph
    lay = radial_layering(emb)
    x = frozenset(out.X)
    lplus = frozenset(out.Lplus)
    paths = tuple(tuple(p) for p in out.paths)
    phi = frozenset(p[0] for p in paths if p)
    if c is None:
        c = len(paths)
    witnesses = []

    structure = True
    if not x <= b.layer:
        structure = False
        witnesses.append("X leaves the layer")
    if x != frozenset(v for p in paths for v in p):
        structure = False
        witnesses.append("X is not the union of the paths")
    for p in paths:
        if not p or len(set(p)) != len(p):
            structure = False
            witnesses.append("path %r is empty or not simple" % (p,))
            continue
        if p[-1] not in b.exits:
            structure = False
            witnesses.append("path %r does not end at an exit" % (p,))
        if any(_norm(p[i], p[i + 1]) not in b.edge_face for i in range(len(p) - 1)):
            structure = False
            witnesses.append("path %r leaves the boundary graph" % (p,))
        elif b.first_violation(p) is not None:
            structure = False
            witnesses.append("path %r is not legal" % (p,))

    expected_ysets = {}
    for f in b.inner:
        for v in sorted(b.face_vertices[f] & x):
            if b.pair_class(f, v) == NORMAL:
                expected_ysets[(f, v)] = b.reach(f, v)
    if dict(out.ysets) != expected_ysets:
        structure = False
        witnesses.append("recorded reach sets disagree with the normal pairs of X")
    if lplus != frozenset(u for y in expected_ysets.values() for u in y):
        structure = False
        witnesses.append("augmentation is not the union of the normal-pair reach sets")

    lplus_clean = lplus <= b.layer and not lplus & b.exits
    if not lplus_clean:
        witnesses.append("augmentation touches an exit or leaves the layer")

    cond1 = True
    for comp in _components_within(g, x):
        if not comp & phi or not _neighborhood(g, comp) & lay.layer(t - 1):
            cond1 = False
            witnesses.append("component %r of X misses phi or the previous layer" % sorted(comp))

    cond2 = True
    extension = lplus | lay.above(t)
    for comp in _components_within(g, extension):
        nb = _neighborhood(g, comp) & b.layer
        if nb and not any(nb <= b.face_vertices[f] for f in b.inner):
            cond2 = False
            witnesses.append("component %r has neighbors %r not inside one face"
                             % (sorted(comp), sorted(nb)))

    enforced = emb.genus == 0
    cond3 = True
    cond4 = True
    faces = {}
    for f in b.inner:
        s = b.singular_count(f)
        cut = len(b.face_vertices[f] & (x - lplus))
        cut_bound = 2 * c + s
        survivors = b.face_vertices[f] - lplus
        kept_edges = [e for e in b.face_edges[f] if e[0] in survivors and e[1] in survivors]
        comp_count = len(_components_within(_EdgeView(survivors, kept_edges), survivors))
        comp_bound = max(1, c * (s + 1)) + 2 * c + s
        faces[f] = {"singular_pairs": s, "cut": cut, "cut_bound": cut_bound,
                    "components": comp_count, "component_bound": comp_bound}
        if enforced and cut > cut_bound:
            cond3 = False
            witnesses.append("face %d keeps %d X-vertices, above %d" % (f, cut, cut_bound))
        if enforced and comp_count > comp_bound:
            cond4 = False
            witnesses.append("face %d splits into %d pieces, above %d" % (f, comp_count, comp_bound))

    normal_reach = True
    for (f, v), y in out.ysets.items():
        y = frozenset(y)
        nb = _neighborhood(g, y) & b.layer
        if not nb <= b.face_vertices[f]:
            normal_reach = False
            witnesses.append("reach set of (%d, %d) has layer neighbors outside the face" % (f, v))
        if len(y) >= 2 and _neighborhood(g, y - {v}) & b.layer != {v}:
            normal_reach = False
            witnesses.append("reach set of (%d, %d) is attached beyond its root" % (f, v))

    report = {
        "t": t,
        "c": c,
        "genus": emb.genus,
        "phi": sorted(phi),
        "bounds_enforced": enforced,
        "structure": structure,
        "augmentation_avoids_exits": lplus_clean,
        "condition1": cond1,
        "condition2": cond2,
        "condition3": cond3,
        "condition4": cond4,
        "normal_reach_properties": normal_reach,
        "outer_only_edges": sorted(e for e, f in b.edge_face.items() if f == OUTER_ONLY),
        "faces": faces,
        "witnesses": witnesses,
    }
    report["ok"] = all((structure, lplus_clean, cond1, cond2, cond3, cond4, normal_reach))
    return report


class _EdgeView:
    """Minimal neighbors() adapter for component search on an edge list."""

    def __init__(self, verts, edges):
        self._adj = {v: [] for v in verts}
        for u, v in edges:
            self._adj[u].append(v)
            self._adj[v].append(u)

    def neighbors(self, v):
        return self._adj[v]
