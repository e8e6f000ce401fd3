"""Combining per-torso decompositions across a clique-sum tree.

The input is a tree decomposition whose torsos each carry an apex plus
embedded structure, with every adhesion hiding inside the apex sets:
a node's own adhesion consists of apices of its torso, and a child's
adhesion brings at most three non-apex vertices into the parent.  Under
those conditions each torso minus its adhesion is decomposed on its own
(protecting one witness neighbor per adhesion vertex), the leftovers of
every bag are routed to a single class chosen by a top-down coloring,
and the union over all nodes partitions the whole vertex set.

The coloring rule sends a child to the class whose parent-level edges
its adhesion clique contains, and that class is unique because the
disjoint per-torso classes can claim at most three adhesion vertices
between them.  The connected-bottom report replays the consequence:
every fake adhesion edge inside a per-torso class is realized by a path
through the colored residues of the children below it.
"""

from __future__ import annotations

from .graphs import Graph
from .rcd import ApexStructure, Rcd, decompose_apex
from .treedecomp import TreeDecomposition, adhesion, gamma_set, torso, validate


class RsInput:
    """A clique-sum instance: graph, tree decomposition, per-torso structures.

    Each torso structure is an ApexStructure over the torso renumbered to
    local ids by rank in the sorted bag.  Construction checks the shapes
    (torso edges match, one structure per node, valid decomposition);
    the adhesion clauses themselves are judged by validate_rs.
    """

    __slots__ = ("graph", "td", "torso_structs", "h", "_bag_order")

    def __init__(self, graph, td, torso_structs, h):
        report = validate(td, graph)
        if not report["ok"]:
            raise ValueError("invalid tree decomposition: %s" % report["witnesses"])
        if set(torso_structs) != set(range(td.n_nodes)):
            raise ValueError("need exactly one torso structure per node")
        bag_order = {}
        for t in range(td.n_nodes):
            order = tuple(sorted(td.bags[t]))
            st = torso_structs[t]
            if st.graph.n != len(order):
                raise ValueError("torso structure at node %d has %d vertices, bag has %d"
                                 % (t, st.graph.n, len(order)))
            tor = torso(td, graph, t)
            mapped = {tuple(sorted((order[u], order[v]))) for u, v in st.graph.edges}
            if mapped != set(tor.edges):
                raise ValueError("torso structure at node %d does not match the torso" % t)
            bag_order[t] = order
        self.graph = graph
        self.td = td
        self.torso_structs = dict(torso_structs)
        self.h = h
        self._bag_order = bag_order

    def bag_order(self, t):
        """Local torso id -> global vertex id, rank order in the bag."""
        return self._bag_order[t]

    def to_local(self, t, vertices):
        rank = {g: i for i, g in enumerate(self._bag_order[t])}
        return frozenset(rank[v] for v in vertices)

    def to_global(self, t, vertices):
        order = self._bag_order[t]
        return frozenset(order[v] for v in vertices)

    def apices_of(self, t):
        """Apex set of the torso at t, in global ids."""
        return self.to_global(t, self.torso_structs[t].apices)

    def to_json(self):
        return {
            "graph": self.graph.to_json(),
            "td": self.td.to_json(),
            "torso_structs": {str(t): st.to_json() for t, st in self.torso_structs.items()},
            "h": self.h,
        }

    @classmethod
    def from_json(cls, obj):
        td = TreeDecomposition.from_json(obj["td"])
        structs = {int(t): ApexStructure.from_json(st)
                   for t, st in obj["torso_structs"].items()}
        return cls(Graph.from_json(obj["graph"]), td, structs, int(obj["h"]))


class Coloring:
    """Class index (1-based) per tree node, root fixed to 1."""

    __slots__ = ("col",)

    def __init__(self, col):
        self.col = dict(col)

    def to_json(self):
        return {str(t): i for t, i in sorted(self.col.items())}


def validate_rs(rs):
    """Per-node report on the adhesion clauses and their consequences.

    Checks, for every node: the adhesion fits in h and hides inside the
    torso's apices; each child adhesion brings at most three non-apex
    vertices; the subtree minus the adhesion is connected with the
    adhesion on its neighborhood; and the same two facts hold inside the
    torso itself.
    """
    g = rs.graph
    td = rs.td
    nodes = {}
    failures = []
    for t in range(td.n_nodes):
        sigma = adhesion(td, t)
        apices = rs.apices_of(t)
        gamma = gamma_set(td, t)
        inner = gamma - sigma
        tor_g = torso(td, g, t)
        bag = td.bags[t]
        checks = {
            "adhesion_size": len(sigma) <= rs.h,
            "adhesion_in_apices": sigma <= apices,
            "child_adhesions": all(
                len(adhesion(td, s) - apices) <= 3 for s in td.children(t)),
            "subtree_connected": _connected_within(g.edges, inner),
            "adhesion_on_subtree": all(g.neighbors(v) & inner for v in sigma),
            "torso_connected": _connected_within(tor_g.edges, bag - sigma),
            "adhesion_on_torso": all(
                _torso_neighbors(tor_g, v) & (bag - sigma) for v in sigma),
        }
        nodes[str(t)] = checks
        for name, ok in checks.items():
            if not ok:
                failures.append({"node": t, "clause": name})
    return {"ok": not failures, "nodes": nodes, "failures": failures}


def build_gt(rs, t):
    """The torso at t with its redundant apex-apex edges removed.

    An apex-apex edge is redundant when some non-apex torso vertex is
    adjacent to both ends.  The result keeps the properties of the torso:
    minus the adhesion it stays connected, and every adhesion vertex
    keeps a neighbor outside the adhesion.  Global ids.
    """
    g = rs.graph
    tor_g = torso(rs.td, g, t)
    apices = rs.apices_of(t)
    bag = rs.td.bags[t]
    rest = bag - apices
    adj = {v: _torso_neighbors(tor_g, v) for v in bag}
    kept = []
    for u, v in tor_g.edges:
        if u in apices and v in apices and any(
                w in adj[u] and w in adj[v] for w in rest):
            continue
        kept.append((u, v))
    out = Graph(g.n, kept)
    sigma = adhesion(rs.td, t)
    assert _connected_within(out.edges, bag - sigma), \
        "reduced torso at node %d disconnected without its adhesion" % t
    for v in sigma:
        assert out.neighbors(v) & (bag - sigma), \
            "adhesion vertex %d lost all torso neighbors at node %d" % (v, t)
    return out


def witness_set(rs, t, gt=None):
    """One witness neighbor per adhesion vertex: smallest id outside the
    adhesion adjacent in the reduced torso.  Global ids."""
    if gt is None:
        gt = build_gt(rs, t)
    sigma = adhesion(rs.td, t)
    rest = rs.td.bags[t] - sigma
    out = set()
    for v in sorted(sigma):
        cands = gt.neighbors(v) & rest
        if not cands:
            raise ValueError("no witness neighbor for vertex %d at node %d" % (v, t))
        out.add(min(cands))
    return frozenset(out)


def color_tree(rs, per_torso):
    """Assign each node the class whose parent-level edges its adhesion
    clique contains, or the parent's color when there is none.

    per_torso maps each node to its class family (global ids).  The
    matching class is unique when it exists; two matches would need four
    non-apex adhesion vertices, which the input clauses exclude.
    """
    td = rs.td
    col = {td.root: 1}
    gts = {}
    for t in _preorder(td):
        if t == td.root:
            continue
        parent = td.parent[t]
        if parent not in gts:
            gts[parent] = build_gt(rs, parent)
        gt = gts[parent]
        sigma = adhesion(td, t)
        hits = []
        for i, z in enumerate(per_torso[parent], start=1):
            picked = sigma & z
            if any(u in gt.neighbors(v) for u in picked for v in picked):
                hits.append(i)
        if len(hits) > 1:
            raise ValueError("adhesion of node %d meets edges of classes %r" % (t, hits))
        col[t] = hits[0] if hits else col[parent]
    return Coloring(col)


def combine(rs, p):
    """Decompose every torso minus its adhesion, color the tree, and
    route each bag's leftover to its node's class.

    The per-torso classes protect the witness neighbors, so the leftovers
    always contain them; the output classes partition the vertex set.
    """
    report = validate_rs(rs)
    if not report["ok"]:
        raise ValueError("input fails the adhesion clauses: %s" % report["failures"])
    td = rs.td
    g = rs.graph

    per_torso = {}
    per_node_meta = {}
    residues = {}
    for t in range(td.n_nodes):
        gt = build_gt(rs, t)
        phi = witness_set(rs, t, gt)
        sigma = adhesion(td, t)
        st = derived_structure(rs, t, gt)
        keep = sorted(td.bags[t] - sigma)
        rank = {v: i for i, v in enumerate(keep)}
        sub = decompose_apex(st, p, frozenset(rank[v] for v in phi))
        classes = tuple(frozenset(keep[v] for v in z) for z in sub.classes)
        per_torso[t] = classes
        residues[t] = frozenset(keep) - frozenset(v for z in classes for v in z)
        per_node_meta[str(t)] = {
            "sigma": sorted(sigma),
            "witness": sorted(phi),
            "classes": [sorted(z) for z in classes],
            "residue": sorted(residues[t]),
        }

    coloring = color_tree(rs, per_torso)
    classes = [set() for _ in range(p)]
    for t in range(td.n_nodes):
        for i in range(p):
            classes[i] |= per_torso[t][i]
        classes[coloring.col[t] - 1] |= residues[t]
        per_node_meta[str(t)]["color"] = coloring.col[t]

    union = set()
    for z in classes:
        assert not (union & z), "classes overlap"
        union |= z
    assert union == set(range(g.n)), "classes do not cover the graph"

    meta = {
        "kind": "cliquesum",
        "p": p,
        "h": rs.h,
        "col": coloring.to_json(),
        "per_node": per_node_meta,
    }
    return Rcd(p, [frozenset(z) for z in classes], frozenset(), meta)


def derived_structure(rs, t, gt=None):
    """ApexStructure of the reduced torso minus its adhesion, renumbered.

    The adhesion sits inside the apices, so the embedded part carries
    over unchanged; only the apex list shrinks and the ids shift.
    """
    if gt is None:
        gt = build_gt(rs, t)
    td = rs.td
    sigma = adhesion(td, t)
    st = rs.torso_structs[t]
    keep = sorted(td.bags[t] - sigma)
    rank = {v: i for i, v in enumerate(keep)}
    edges = [(rank[u], rank[v]) for u, v in gt.edges
             if u not in sigma and v not in sigma]
    apices = [rank[v] for v in sorted(rs.apices_of(t) - sigma)]
    bag = rs.bag_order(t)
    order = tuple(rank[bag[local]] for local in st.order)
    return ApexStructure(Graph(len(keep), edges), apices, st.embeddable,
                         rs.h, order=order)


def verify_connected_bottom(rs, rcd):
    """Exact search confirming every per-torso class edge is realized.

    For each node, class, and torso edge inside the node's class, the two
    ends must be connected using only class vertices drawn from the
    subtrees of children whose adhesion contains both ends.  Real graph
    edges pass outright; fake adhesion edges need a path below.
    """
    g = rs.graph
    td = rs.td
    per_node = rcd.meta["per_node"]
    checks = []
    failures = []
    for t in range(td.n_nodes):
        tor_edges = torso(td, g, t).edges
        kids = td.children(t)
        inner = {s: gamma_set(td, s) - adhesion(td, s) for s in kids}
        for i in range(rcd.p):
            zt = frozenset(per_node[str(t)]["classes"][i])
            zi = rcd.classes[i]
            for u, v in tor_edges:
                if u not in zt or v not in zt:
                    continue
                allowed = {u, v}
                for s in kids:
                    sig = adhesion(td, s)
                    if u in sig and v in sig:
                        allowed |= inner[s] & zi
                ok = _connected_pair(g, allowed, u, v)
                real = v in g.neighbors(u)
                entry = {"node": t, "class": i + 1, "edge": [u, v],
                         "real": real, "ok": ok}
                checks.append(entry)
                if not ok:
                    failures.append(entry)
    return {"ok": not failures, "checks": checks, "failures": failures}


def _torso_neighbors(tor_g, v):
    return tor_g.neighbors(v)


def _connected_within(edges, verts):
    """Is the subgraph induced on verts connected (or empty)?"""
    verts = set(verts)
    if not verts:
        return True
    adj = {v: set() for v in verts}
    for u, v in edges:
        if u in verts and v in verts:
            adj[u].add(v)
            adj[v].add(u)
    seen = {min(verts)}
    stack = [min(verts)]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == verts


def _connected_pair(g, allowed, u, v):
    """Are u and v connected inside G[allowed]?"""
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        if x == v:
            return True
        for w in g.neighbors(x):
            if w in allowed and w not in seen:
                seen.add(w)
                stack.append(w)
    return v in seen


def _preorder(td):
    kids = {}
    for i, par in enumerate(td.parent):
        kids.setdefault(par, []).append(i)
    out = []
    stack = [td.root]
    while stack:
        t = stack.pop()
        out.append(t)
        stack.extend(reversed(kids.get(t, [])))
    return out
