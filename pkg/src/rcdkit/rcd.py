"""Robust contraction decompositions of embedded graphs, with apex support.

The engine carves p disjoint classes Z_1..Z_p out of the radial layering.
Layers touching the closed neighborhood of the protected set phi are bad
and withheld entirely; on every good layer the key-set machinery removes
a connector X_t and an augmentation L_t+ chosen so that the leftovers of
every Delta-th layer can be contracted, minus any small omitted set,
without the treewidth escaping O(p + omitted).  The withheld vertices
keep phi inside a single connected component of the remainder.

Apex-augmented graphs decompose per component of the graph minus the
apices, each component protecting its share of phi plus one projection
image per apex that touches it; the apices themselves are never placed
in any class.  Reports from verify_rcd sample omitted subsets and record
treewidth ratios rather than re-deriving the construction.
"""

from __future__ import annotations

import random

from .embedding import is_minimal, radial_layering, restrict
from .graphs import Graph, components, contract_set, is_connected
from .keylemma import compute_key_sets
from .treewidth import EXACT_LIMIT, exact_treewidth, upper_bound


class ApexStructure:
    """A graph split into an apex set and an embedded remainder.

    `embeddable` is an embedding of the graph minus the apices; `order`
    maps its vertex ids to graph ids and defaults to the sorted non-apex
    vertices, which is the identity when the apices occupy the top ids.
    """

    __slots__ = ("graph", "apices", "embeddable", "h", "order")

    def __init__(self, graph, apices, embeddable, h, order=None):
        apices = frozenset(apices)
        for a in apices:
            if not (0 <= a < graph.n):
                raise ValueError("apex %d out of range" % a)
        if len(apices) > h:
            raise ValueError("%d apices exceed h=%d" % (len(apices), h))
        rest = sorted(set(range(graph.n)) - apices)
        if order is None:
            order = tuple(rest)
        else:
            order = tuple(order)
            if sorted(order) != rest:
                raise ValueError("order must enumerate the non-apex vertices")
        if embeddable.graph.n != len(order):
            raise ValueError("embedding has %d vertices, expected %d"
                             % (embeddable.graph.n, len(order)))
        mapped = {(order[u], order[v]) if order[u] < order[v] else (order[v], order[u])
                  for u, v in embeddable.graph.edges}
        rest_set = set(rest)
        expect = {e for e in graph.edges if e[0] in rest_set and e[1] in rest_set}
        if mapped != expect:
            raise ValueError("embedding edges do not match the graph minus apices")
        if not is_minimal(embeddable):
            raise ValueError("embedding of the non-apex part must be minimal")
        self.graph = graph
        self.apices = apices
        self.embeddable = embeddable
        self.h = h
        self.order = order

    def to_json(self):
        return {
            "graph": self.graph.to_json(),
            "apices": sorted(self.apices),
            "embeddable": self.embeddable.to_json(),
            "h": self.h,
            "order": list(self.order),
        }

    @classmethod
    def from_json(cls, obj):
        from .embedding import Embedding

        return cls(Graph.from_json(obj["graph"]), obj["apices"],
                   Embedding.from_json(obj["embeddable"]), int(obj["h"]),
                   order=obj.get("order"))


class Rcd:
    """Disjoint classes Z_1..Z_p plus the residue that holds phi together."""

    __slots__ = ("p", "classes", "residue", "meta")

    def __init__(self, p, classes, residue, meta=None):
        classes = tuple(frozenset(z) for z in classes)
        if p < 1 or len(classes) != p:
            raise ValueError("expected %d classes, got %d" % (p, len(classes)))
        seen = set()
        for z in classes:
            if seen & z:
                raise ValueError("classes overlap on %r" % sorted(seen & z))
            seen |= z
        self.p = p
        self.classes = classes
        self.residue = frozenset(residue)
        self.meta = dict(meta or {})

    def to_json(self):
        return {
            "p": self.p,
            "classes": [sorted(z) for z in self.classes],
            "residue": sorted(self.residue),
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["p"]), [frozenset(z) for z in obj["classes"]],
                   frozenset(obj["residue"]), obj.get("meta"))


class ConnectorSets:
    """Per-layer withheld sets: X_t everywhere, seeds and augmentation on good layers."""

    __slots__ = ("phi", "bad", "good", "xs", "phis", "lplus")

    def __init__(self, phi, bad, good, xs, phis, lplus):
        self.phi = frozenset(phi)
        self.bad = frozenset(bad)
        self.good = frozenset(good)
        self.xs = dict(xs)
        self.phis = dict(phis)
        self.lplus = dict(lplus)

    @property
    def depth(self):
        return len(self.xs)


def classify_layers(emb, phi, h=0):
    """Split layer indices into bad and good around the protected set phi.

    Layer 1 is always bad; a deeper layer is bad when the closed
    neighborhood of phi meets it.  At most 3|phi|+1 layers can be bad
    because neighbors sit at most one layer apart.
    """
    lay = radial_layering(emb)
    phi = frozenset(phi)
    g = emb.graph
    closed = set(phi)
    for v in phi:
        closed |= g.neighbors(v)
    bad = {1}
    for t in range(2, lay.depth + 1):
        if closed & lay.layer(t):
            bad.add(t)
    assert len(bad) <= 3 * len(phi) + 1, "bad layer count exceeds 3c+1"
    good = frozenset(range(1, lay.depth + 1)) - bad
    return frozenset(bad), good


def build_connectors(emb, phi, h=0):
    """Construct X_m..X_1 top-down so the withheld vertices connect phi.

    Bad layers are withheld whole.  On a good layer the seeds are the
    smallest layer-neighbors of the components above that contain a phi
    vertex, and the key-set construction supplies X_t and the
    augmentation.  Afterwards phi must lie in one connected component of
    the graph induced on the union of the X_t, which is asserted.
    """
    lay = radial_layering(emb)
    phi = frozenset(phi)
    g = emb.graph
    for v in phi:
        if not (0 <= v < g.n):
            raise ValueError("phi vertex %d out of range" % v)
    bad, good = classify_layers(emb, phi, h)
    m = lay.depth
    xs = {}
    phis = {}
    lplus = {}
    above = set()
    for t in range(m, 0, -1):
        if t in bad:
            xs[t] = lay.layer(t)
        else:
            phi_t = set()
            for comp in _components_of(g, above):
                if not (comp & phi):
                    continue
                doors = _neighborhood(g, comp) & lay.layer(t)
                if doors:
                    phi_t.add(min(doors))
            assert len(phi_t) <= len(phi), "seed count exceeds |phi|"
            out = compute_key_sets(emb, t, frozenset(phi_t))
            xs[t] = out.X
            phis[t] = frozenset(phi_t)
            lplus[t] = out.Lplus
        above |= xs[t]
    if phi:
        comps = _components_of(g, above)
        holders = {id(c) for c in comps for v in phi if v in c}
        assert len(holders) == 1, "phi is not connected through the withheld sets"
    return ConnectorSets(phi, bad, good, xs, phis, lplus)


def assemble(emb, connectors, p, c, h):
    """Collect every Delta-th residue layer into a class, skipping bad residues.

    Delta = p + 3c + 4h + 1 leaves at least p residues untouched by bad
    layers; the p smallest good residues become the classes, each taking
    the good layers congruent to it minus their X and augmentation sets.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    lay = radial_layering(emb)
    m = lay.depth
    delta = p + 3 * c + 4 * h + 1
    bad_residues = {((t - 1) % delta) + 1 for t in connectors.bad}
    good_residues = [q for q in range(1, delta + 1) if q not in bad_residues]
    assert len(good_residues) >= p, "fewer than p good residues"
    qs = good_residues[:p]

    classes = []
    for q in qs:
        z = set()
        for t in range(q, m + 1, delta):
            z |= lay.layer(t) - connectors.xs[t] - connectors.lplus.get(t, frozenset())
        classes.append(frozenset(z))

    taken = frozenset(v for z in classes for v in z)
    for t in connectors.bad:
        assert not (taken & lay.layer(t)), "a class entered a bad layer"
    g = emb.graph
    closed = set(connectors.phi)
    for v in connectors.phi:
        closed |= g.neighbors(v)
    assert not (taken & closed), "a class touches N[phi]"

    residue = frozenset(range(g.n)) - taken
    meta = {
        "p": p,
        "c": c,
        "h": h,
        "delta": delta,
        "depth": m,
        "residues": qs,
        "bad_layers": sorted(connectors.bad),
        "phi": sorted(connectors.phi),
        "x_sets": {str(t): sorted(x) for t, x in sorted(connectors.xs.items())},
        "l_plus": {str(t): sorted(x) for t, x in sorted(connectors.lplus.items())},
        "phi_sets": {str(t): sorted(x) for t, x in sorted(connectors.phis.items())},
    }
    return Rcd(p, classes, residue, meta)


def decompose_embedded(emb, p, phi, h=0):
    """Decomposition of a connected, minimally embedded graph.

    The classes avoid N[phi], and phi ends up inside one connected
    component of the graph minus all classes, which is verified here by
    direct search.
    """
    if not is_connected(emb.graph):
        raise ValueError("graph must be connected")
    if not is_minimal(emb):
        raise ValueError("embedding must be minimal")
    phi = frozenset(phi)
    connectors = build_connectors(emb, phi, h)
    rcd = assemble(emb, connectors, p, len(phi), h)
    rcd.meta["kind"] = "embedded"
    taken = set(v for z in rcd.classes for v in z)
    if phi:
        remain = set(range(emb.graph.n)) - taken
        comps = _components_of(emb.graph, remain)
        holders = {id(c) for c in comps for v in phi if v in c}
        assert len(holders) == 1, "phi split across components of the remainder"
    return rcd


def decompose_apex(st, p, phi):
    """Decomposition of an apex-augmented graph, one component at a time.

    Each component of the graph minus the apices is decomposed with its
    share of phi plus one projection image per apex touching it.  The
    classes avoid the apices and N[phi - apices]; phi stays connected in
    the remainder even after cutting every apex edge that leads to a
    class neighbor.  Both facts are verified here.
    """
    g = st.graph
    if not is_connected(g):
        raise ValueError("graph must be connected")
    phi = frozenset(phi)
    for v in phi:
        if not (0 <= v < g.n):
            raise ValueError("phi vertex %d out of range" % v)
    apices = st.apices
    to_graph = st.order
    to_local = {gid: i for i, gid in enumerate(to_graph)}

    z_union = [set() for _ in range(p)]
    comp_meta = []
    for comp_local in components(st.embeddable.graph):
        comp = frozenset(to_graph[v] for v in comp_local)
        projections = []
        pis = set()
        for a in sorted(apices):
            doors = g.neighbors(a) & comp
            if doors:
                img = min(doors)
                pis.add(img)
                projections.append([a, img])
        phi_j = (phi & comp) | pis
        res = restrict(st.embeddable, comp_local)
        inv = {to_graph[parent]: i for i, parent in enumerate(res.order)}
        sub = decompose_embedded(res.embedding, p, frozenset(inv[v] for v in phi_j), h=st.h)
        for i in range(p):
            z_union[i] |= {to_graph[v] for v in res.to_parent(sub.classes[i])}
        comp_meta.append({
            "n": len(comp),
            "min_vertex": min(comp),
            "phi": sorted(phi_j),
            "projections": projections,
            "delta": sub.meta["delta"],
            "residues": sub.meta["residues"],
            "bad_layers": sub.meta["bad_layers"],
        })

    classes = tuple(frozenset(z) for z in z_union)
    taken = frozenset(v for z in classes for v in z)
    closed = set(phi - apices)
    for v in phi - apices:
        closed |= g.neighbors(v)
    assert not (taken & closed), "a class touches N[phi - apices]"
    assert not (taken & apices), "a class contains an apex"

    if phi:
        keep = set(range(g.n)) - taken
        fringe = _neighborhood(g, taken) - apices
        allowed = {e for e in g.edges
                   if not ((e[0] in apices and e[1] in fringe)
                           or (e[1] in apices and e[0] in fringe))}
        comps = _components_within(keep, allowed)
        holders = {id(c) for c in comps for v in phi if v in c}
        assert len(holders) == 1, "phi split in the apex-pruned remainder"

    residue = frozenset(range(g.n)) - taken
    meta = {
        "kind": "apex",
        "p": p,
        "h": st.h,
        "apices": sorted(apices),
        "phi": sorted(phi),
        "components": comp_meta,
    }
    return Rcd(p, classes, residue, meta)


def verify_rcd(g, rcd, samples, seed=0, s_max=5, strategy="random", threshold=None):
    """Sample omitted subsets and measure contracted treewidth ratios.

    Classes are cycled; the first visit to each class omits nothing.
    Further samples omit up to s_max vertices, drawn uniformly or, with
    the cut strategy, as a breadth-first frontier inside the class.  Each
    sample contracts Z_i minus the omission and records the heuristic
    treewidth bound, the exact value when the quotient is small enough,
    and the ratio bound / (p + omitted + 1).  Samples that contract
    nothing record the raw treewidth but stay out of the ratio.  The
    report fails only when a threshold is configured and exceeded.
    """
    if strategy not in ("random", "cut"):
        raise ValueError("strategy must be 'random' or 'cut'")
    rng = random.Random(seed)
    p = rcd.p
    entries = []
    ratios = []
    for k in range(samples):
        i = k % p
        zi = rcd.classes[i]
        if k < p or not zi:
            zprime = frozenset()
        elif strategy == "random":
            size = rng.randint(0, min(s_max, len(zi)))
            zprime = frozenset(rng.sample(sorted(zi), size))
        else:
            zprime = _frontier_sample(g, zi, s_max, rng)
        contract = zi - zprime
        quotient, _ = contract_set(g, contract)
        ub, _ = upper_bound(quotient)
        exact = None
        if quotient.n <= EXACT_LIMIT:
            exact = exact_treewidth(quotient)[0]
        bound = ub if exact is None else exact
        counted = bool(contract)
        ratio = bound / (p + len(zprime) + 1)
        if counted:
            ratios.append(ratio)
        entries.append({
            "class": i,
            "omitted": sorted(zprime),
            "quotient_n": quotient.n,
            "tw_ub": ub,
            "tw_exact": exact,
            "bound": bound,
            "ratio": ratio,
            "counted": counted,
        })
    max_ratio = max(ratios) if ratios else None
    ok = threshold is None or max_ratio is None or max_ratio <= threshold
    return {
        "ok": ok,
        "p": p,
        "samples": entries,
        "max_ratio": max_ratio,
        "threshold": threshold,
        "strategy": strategy,
        "s_max": s_max,
        "seed": seed,
    }


def _frontier_sample(g, zi, s_max, rng):
    """Breadth-first frontier inside G[zi], a cut-shaped omission."""
    start = rng.choice(sorted(zi))
    depth = rng.randint(1, 3)
    ring = {start}
    seen = {start}
    for _ in range(depth):
        nxt = set()
        for v in ring:
            nxt |= g.neighbors(v) & zi
        nxt -= seen
        if not nxt:
            break
        seen |= nxt
        ring = nxt
    return frozenset(sorted(ring)[:s_max])


def _components_of(g, verts):
    """Connected components of G[verts] as frozensets."""
    verts = set(verts)
    out = []
    seen = set()
    for v in sorted(verts):
        if v in seen:
            continue
        comp = {v}
        queue = [v]
        while queue:
            u = queue.pop()
            for w in g.neighbors(u):
                if w in verts and w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def _components_within(verts, edges):
    """Components of the graph (verts, edges restricted to verts)."""
    adj = {v: set() for v in verts}
    for u, v in edges:
        if u in adj and v in adj:
            adj[u].add(v)
            adj[v].add(u)
    out = []
    seen = set()
    for v in sorted(verts):
        if v in seen:
            continue
        comp = {v}
        queue = [v]
        while queue:
            u = queue.pop()
            for w in adj[u]:
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def _neighborhood(g, s):
    """Open neighborhood of the set s."""
    out = set()
    for v in s:
        out |= g.neighbors(v)
    return frozenset(out - set(s))
