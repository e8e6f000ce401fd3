"""Simple undirected graphs with contraction, connectivity, and minor testing.

Vertices are dense integer ids 0..n-1.  Graphs are immutable once built;
every operation that changes structure returns a new Graph.  Contracting a
vertex set U merges each connected component of G[U] into a single vertex,
collapsing parallel edges and dropping loops.
"""

from __future__ import annotations


class Graph:
    """Immutable simple undirected graph on vertices 0..n-1."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n, edges=()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError("loops are not allowed: (%d, %d)" % (u, v))
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError("edge (%d, %d) out of range for n=%d" % (u, v, n))
            norm.add((u, v) if u < v else (v, u))
        self.n = n
        self.edges = frozenset(norm)
        adj = [set() for _ in range(n)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = tuple(frozenset(s) for s in adj)

    def neighbors(self, v):
        return self._adj[v]

    def degree(self, v):
        return len(self._adj[v])

    def has_edge(self, u, v):
        return v in self._adj[u] if 0 <= u < self.n else False

    def edge_list(self):
        """Edges as a deterministically sorted list of (u, v) with u < v."""
        return sorted(self.edges)

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return "Graph(n=%d, m=%d)" % (self.n, len(self.edges))

    def to_json(self):
        return {"n": self.n, "edges": [list(e) for e in self.edge_list()]}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["n"]), [(int(u), int(v)) for u, v in obj["edges"]])

    def to_dot(self, name="G"):
        lines = ["graph %s {" % name]
        for v in range(self.n):
            lines.append("  %d;" % v)
        for u, v in self.edge_list():
            lines.append("  %d -- %d;" % (u, v))
        lines.append("}")
        return "\n".join(lines)


class QuotientMap:
    """Surjection from the vertices of a source graph onto a contracted image.

    image[v] is the target vertex holding source vertex v.  Target ids are
    assigned in order of the smallest source id in each merged class, so the
    map is deterministic given the contracted set.
    """

    __slots__ = ("source", "target", "image")

    def __init__(self, source, target, image):
        self.source = source
        self.target = target
        self.image = tuple(image)

    def preimage(self, t):
        return frozenset(v for v in range(self.source.n) if self.image[v] == t)

    def classes(self):
        """Source classes indexed by target id."""
        out = [[] for _ in range(self.target.n)]
        for v, t in enumerate(self.image):
            out[t].append(v)
        return [tuple(c) for c in out]


def _component_of(adj, start, allowed):
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y in allowed and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def components(g):
    """Connected components as sorted lists, ordered by smallest member."""
    out = []
    seen = set()
    for v in range(g.n):
        if v in seen:
            continue
        comp = _component_of(g._adj, v, range(g.n))
        seen |= comp
        out.append(sorted(comp))
    return out


def is_connected(g):
    if g.n == 0:
        return True
    return len(_component_of(g._adj, 0, range(g.n))) == g.n


def contract_set(g, u):
    """Contract each connected component of G[U] to a single vertex.

    Returns (target graph, QuotientMap).  Vertices outside U stay singleton
    classes.  Target ids follow the smallest source id per class.
    """
    u = set(u)
    for v in u:
        if not (0 <= v < g.n):
            raise ValueError("vertex %d out of range" % v)
    classes = []
    seen = set()
    for v in sorted(u):
        if v in seen:
            continue
        comp = _component_of(g._adj, v, u)
        seen |= comp
        classes.append(comp)
    for v in range(g.n):
        if v not in u:
            classes.append({v})
    classes.sort(key=min)
    image = [0] * g.n
    for t, cls in enumerate(classes):
        for v in cls:
            image[v] = t
    edges = set()
    for a, b in g.edges:
        ia, ib = image[a], image[b]
        if ia != ib:
            edges.add((min(ia, ib), max(ia, ib)))
    target = Graph(len(classes), edges)
    return target, QuotientMap(g, target, image)


def quotient_connected(q, u_prime):
    """Whether the target-side induced subgraph on u_prime is connected.

    Empty sets and singletons count as connected.  Agrees with connectivity
    of the source preimage, since each merged class is connected.
    """
    u_prime = set(u_prime)
    for t in u_prime:
        if not (0 <= t < q.target.n):
            raise ValueError("target vertex %d out of range" % t)
    if len(u_prime) <= 1:
        return True
    start = next(iter(u_prime))
    return len(_component_of(q.target._adj, start, u_prime)) == len(u_prime)


def induced_subgraph(g, s):
    """Induced subgraph on vertex set s, renumbered densely.

    Returns (subgraph, order) where order[i] is the source id of new
    vertex i; the renumbering follows ascending source ids.
    """
    order = sorted(set(s))
    for v in order:
        if not (0 <= v < g.n):
            raise ValueError("vertex %d out of range" % v)
    idx = {v: i for i, v in enumerate(order)}
    edges = [(idx[u], idx[v]) for u, v in g.edges if u in idx and v in idx]
    return Graph(len(order), edges), order


def _connected_subsets(adj, allowed, max_size):
    """Yield the connected subsets of `allowed`, each exactly once.

    Subsets are rooted at their smallest member; the extension-set scheme
    guarantees no duplicates without storing previously seen sets.
    """
    allowed = sorted(allowed)
    pos = {v: i for i, v in enumerate(allowed)}
    for r in allowed:
        base_block = {v for v in allowed if pos[v] < pos[r]}

        def rec(cur, frontier, blocked):
            yield frozenset(cur)
            if len(cur) >= max_size:
                return
            ext = sorted(v for v in frontier if v not in blocked)
            taken = set()
            for v in ext:
                cur.add(v)
                new_frontier = frontier | {w for w in adj[v] if w in pos and w not in cur}
                yield from rec(cur, new_frontier, blocked | taken | {v})
                cur.discard(v)
                taken.add(v)

        start_frontier = {w for w in adj[r] if w in pos}
        yield from rec({r}, start_frontier, base_block | {r})


def is_minor(h, g):
    """Whether h is a minor of g, by exhaustive branch-set search.

    Oracle-scale only: requires |V(h)| <= 6 and |V(g)| <= 14.  Searches for
    disjoint connected branch sets in g, one per vertex of h, with an edge
    of g between every pair of branch sets joined in h.
    """
    if h.n > 6:
        raise ValueError("minor pattern too large: %d > 6 vertices" % h.n)
    if g.n > 14:
        raise ValueError("host graph too large: %d > 14 vertices" % g.n)
    if h.n == 0:
        return True
    if h.n > g.n or len(h.edges) > len(g.edges):
        return False

    order = sorted(range(h.n), key=lambda v: (-h.degree(v), v))
    hadj = [sorted(h.neighbors(v)) for v in range(h.n)]
    branch = {}

    def adjacent_sets(a, b):
        return any(w in g._adj[v] for v in a for w in b)

    def place(idx, used):
        if idx == len(order):
            return True
        hv = order[idx]
        placed_nb = [w for w in hadj[hv] if w in branch]
        remaining = len(order) - idx
        avail = [v for v in range(g.n) if v not in used]
        if len(avail) < remaining:
            return False
        cap = len(avail) - (remaining - 1)
        for cand in _connected_subsets(g._adj, avail, cap):
            if all(adjacent_sets(cand, branch[w]) for w in placed_nb):
                branch[hv] = cand
                if place(idx + 1, used | cand):
                    return True
                del branch[hv]
        return False

    return place(0, frozenset())
