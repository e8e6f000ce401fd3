"""Rooted tree decompositions: validation, torsos, gluing, induced quotients.

A decomposition is a rooted tree with one bag per node.  Adhesions are
intersections with the parent bag, torsos add a clique on every child
adhesion, and glue() composes per-torso decompositions into one for the
whole graph at the cost of doubling the width.  Text interop follows the
PACE .td format.
"""

from __future__ import annotations

from .graphs import Graph


class TreeDecomposition:
    """Rooted tree of bags.  Nodes are dense ids; parent[root] == -1."""

    __slots__ = ("parent", "bags", "root")

    def __init__(self, parent, bags):
        parent = tuple(parent)
        bags = tuple(frozenset(b) for b in bags)
        if len(parent) != len(bags) or not bags:
            raise ValueError("need one parent link per bag, at least one node")
        roots = [i for i, p in enumerate(parent) if p == -1]
        if len(roots) != 1:
            raise ValueError("exactly one root required")
        seen = set()
        for i in range(len(parent)):
            path = []
            j = i
            while j != -1 and j not in seen:
                path.append(j)
                j = parent[j]
                if not (-1 <= j < len(parent)):
                    raise ValueError("parent link out of range")
                if j in path:
                    raise ValueError("cycle in parent links")
            seen.update(path)
        self.parent = parent
        self.bags = bags
        self.root = roots[0]

    @property
    def n_nodes(self):
        return len(self.bags)

    @property
    def width(self):
        return max(len(b) for b in self.bags) - 1

    def children(self, t):
        return [i for i, p in enumerate(self.parent) if p == t]

    def subtree(self, t):
        """Node ids in the subtree rooted at t, in preorder."""
        kids = {}
        for i, p in enumerate(self.parent):
            kids.setdefault(p, []).append(i)
        out = []
        stack = [t]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(reversed(kids.get(x, [])))
        return out

    def to_json(self):
        return {"parent": list(self.parent), "bags": [sorted(b) for b in self.bags]}

    @classmethod
    def from_json(cls, obj):
        return cls([int(p) for p in obj["parent"]], [set(map(int, b)) for b in obj["bags"]])


def validate(td, g):
    """Check the three decomposition axioms against g.

    Returns a report with one flag per axiom plus witnesses for failures.
    Empty bags are fine.
    """
    covered = set()
    for b in td.bags:
        covered |= b
    missing_vertices = sorted(set(range(g.n)) - covered)
    stray = sorted(covered - set(range(g.n)))

    missing_edges = []
    for e in g.edge_list():
        if not any(e[0] in b and e[1] in b for b in td.bags):
            missing_edges.append(list(e))

    disconnected = []
    for v in range(g.n):
        nodes = {t for t, b in enumerate(td.bags) if v in b}
        if not nodes:
            continue
        start = min(nodes)
        seen = {start}
        stack = [start]
        while stack:
            t = stack.pop()
            for u in list(td.children(t)) + [td.parent[t]]:
                if u in nodes and u not in seen:
                    seen.add(u)
                    stack.append(u)
        if seen != nodes:
            disconnected.append(v)

    report = {
        "covers_vertices": not missing_vertices and not stray,
        "covers_edges": not missing_edges,
        "vertex_connected": not disconnected,
        "witnesses": {},
    }
    if missing_vertices:
        report["witnesses"]["missing_vertices"] = missing_vertices
    if stray:
        report["witnesses"]["stray_vertices"] = stray
    if missing_edges:
        report["witnesses"]["missing_edges"] = missing_edges
    if disconnected:
        report["witnesses"]["disconnected_vertices"] = disconnected
    report["ok"] = report["covers_vertices"] and report["covers_edges"] and report["vertex_connected"]
    return report


def adhesion(td, t):
    """Bag intersection with the parent bag; empty at the root."""
    if not (0 <= t < td.n_nodes):
        raise ValueError("unknown node %d" % t)
    p = td.parent[t]
    if p == -1:
        return frozenset()
    return td.bags[t] & td.bags[p]


def gamma_set(td, t):
    """Union of all bags in the subtree rooted at t."""
    if not (0 <= t < td.n_nodes):
        raise ValueError("unknown node %d" % t)
    out = set()
    for s in td.subtree(t):
        out |= td.bags[s]
    return frozenset(out)


def torso(td, g, t):
    """Bag-induced subgraph plus a clique on each child adhesion.

    The result lives on the original vertex ids of g, returned as a Graph
    on vertices 0..g.n-1 restricted to the bag (edges only inside the bag).
    """
    if not (0 <= t < td.n_nodes):
        raise ValueError("unknown node %d" % t)
    bag = td.bags[t]
    edges = {e for e in g.edges if e[0] in bag and e[1] in bag}
    for s in td.children(t):
        adh = sorted(td.bags[s] & bag)
        for i in range(len(adh)):
            for j in range(i + 1, len(adh)):
                edges.add((adh[i], adh[j]))
    return Graph(g.n, edges)


def torso_vertices(td, t):
    return td.bags[t]


def glue(td_outer, per_torso_tds, g):
    """Compose per-torso decompositions into one decomposition of g.

    Each torso decomposition is shifted into a shared id space, every bag
    is augmented by the node's adhesion, and the root of each non-root
    block is attached under the smallest-id node of the parent block whose
    bag contains the adhesion.  Width at most 2k+1 for torso width k.
    """
    offsets = []
    total = 0
    for s in range(td_outer.n_nodes):
        offsets.append(total)
        total += per_torso_tds[s].n_nodes

    bags = [None] * total
    parent = [None] * total
    for s in range(td_outer.n_nodes):
        inner = per_torso_tds[s]
        sigma = adhesion(td_outer, s)
        off = offsets[s]
        for u in range(inner.n_nodes):
            bags[off + u] = inner.bags[u] | sigma
            parent[off + u] = -1 if inner.parent[u] == -1 else off + inner.parent[u]
        if td_outer.parent[s] != -1:
            host = per_torso_tds[td_outer.parent[s]]
            attach = None
            for u in range(host.n_nodes):
                if sigma <= host.bags[u]:
                    attach = u
                    break
            assert attach is not None, "adhesion not inside any parent torso bag"
            parent[off + inner.root] = offsets[td_outer.parent[s]] + attach
    out = TreeDecomposition(parent, bags)
    return out


def induced_by_contraction(td, q):
    """Push the decomposition through a quotient map: bags become images.

    The result is a valid decomposition of q.target whenever td is valid
    for q.source.
    """
    bags = [frozenset(q.image[v] for v in b) for b in td.bags]
    out = TreeDecomposition(td.parent, bags)
    report = validate(out, q.target)
    assert report["ok"], "quotient decomposition failed validation: %r" % report
    return out


def to_td_text(td, n_vertices):
    """PACE-style .td text: 1-indexed bags and vertices."""
    lines = ["s td %d %d %d" % (td.n_nodes, max(len(b) for b in td.bags), n_vertices)]
    for i, b in enumerate(td.bags):
        lines.append(("b %d " % (i + 1) + " ".join(str(v + 1) for v in sorted(b))).rstrip())
    for i, p in enumerate(td.parent):
        if p != -1:
            lines.append("%d %d" % (p + 1, i + 1))
    return "\n".join(lines) + "\n"


def from_td_text(text):
    """Parse PACE-style .td text; the tree is rooted at the first bag."""
    n_bags = None
    bags = {}
    tree_edges = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if parts[1] != "td":
                raise ValueError("not a td header: %r" % line)
            n_bags = int(parts[2])
        elif parts[0] == "b":
            bags[int(parts[1]) - 1] = {int(x) - 1 for x in parts[2:]}
        else:
            a, b = int(parts[0]) - 1, int(parts[1]) - 1
            tree_edges.append((a, b))
    if n_bags is None:
        raise ValueError("missing s td header")
    bag_list = [bags.get(i, set()) for i in range(n_bags)]
    adj = {i: set() for i in range(n_bags)}
    for a, b in tree_edges:
        adj[a].add(b)
        adj[b].add(a)
    parent = [-2] * n_bags
    parent[0] = -1
    stack = [0]
    seen = {0}
    while stack:
        t = stack.pop()
        for u in sorted(adj[t]):
            if u not in seen:
                seen.add(u)
                parent[u] = t
                stack.append(u)
    if len(seen) != n_bags:
        raise ValueError("tree edges do not connect all bags")
    return TreeDecomposition(parent, bag_list)
