"""Treewidth oracles: exact subset DP for tiny graphs, min-fill upper
bounds, and degeneracy/contraction lower bounds.

The exact solver runs the classic dynamic program over vertex subsets:
eliminating a vertex v after the set S costs the number of vertices outside
S reachable from v through S.  The optimum over elimination orders is the
treewidth, and the recorded choices yield a certifying decomposition.
"""

from __future__ import annotations

from .graphs import Graph
from .treedecomp import TreeDecomposition, validate

EXACT_LIMIT = 15


def _reach_cost(adj_masks, smask, v):
    """Vertices outside S u {v} reachable from v through S, as a bitmask."""
    region = 1 << v
    while True:
        nb = 0
        x = region
        while x:
            b = x & -x
            nb |= adj_masks[b.bit_length() - 1]
            x ^= b
        grow = nb & smask & ~region
        if not grow:
            return nb & ~smask & ~(1 << v)
        region |= grow


def _td_from_order(g, order, bags_by_vertex):
    """Tree decomposition from an elimination order and per-vertex bags.

    Each vertex gets one node.  A node attaches to the bag of the earliest
    eliminated later vertex it contains, which keeps every bag's overlap
    with its parent intact; vertices with no later bag members chain to the
    next eliminated vertex so the tree stays connected.
    """
    pos = {v: i for i, v in enumerate(order)}
    parent = [-1] * len(order)
    for i, v in enumerate(order):
        later = [u for u in bags_by_vertex[v] if u != v]
        if later:
            nxt = min(later, key=lambda u: pos[u])
            parent[i] = pos[nxt]
        elif i + 1 < len(order):
            parent[i] = i + 1
    bags = [bags_by_vertex[v] for v in order]
    return TreeDecomposition(parent, bags)


def exact_treewidth(g, limit=EXACT_LIMIT):
    """Exact treewidth with a certifying decomposition.

    Subset DP over elimination orders, O(2^n * n) states.  The default
    size cap keeps runtime sane; callers that can afford the wait may
    raise `limit` explicitly.
    """
    n = g.n
    if n > limit:
        raise ValueError("exact treewidth limited to %d vertices, got %d" % (limit, n))
    if n == 0:
        return -1, TreeDecomposition([-1], [frozenset()])
    adj_masks = [0] * n
    for u, v in g.edges:
        adj_masks[u] |= 1 << v
        adj_masks[v] |= 1 << u

    full = (1 << n) - 1
    dp = [-1] * (full + 1)
    choice = [-1] * (full + 1)
    for mask in range(1, full + 1):
        best = n
        bestv = -1
        x = mask
        while x:
            b = x & -x
            x ^= b
            v = b.bit_length() - 1
            prev = dp[mask ^ b]
            if prev >= best:
                continue
            cost = bin(_reach_cost(adj_masks, mask ^ b, v)).count("1")
            val = prev if prev > cost else cost
            if val < best:
                best = val
                bestv = v
        dp[mask] = best
        choice[mask] = bestv

    order = []
    mask = full
    while mask:
        v = choice[mask]
        order.append(v)
        mask ^= 1 << v
    order.reverse()

    bags_by_vertex = {}
    smask = 0
    for v in order:
        q = _reach_cost(adj_masks, smask, v)
        bag = {v}
        x = q
        while x:
            b = x & -x
            bag.add(b.bit_length() - 1)
            x ^= b
        bags_by_vertex[v] = frozenset(bag)
        smask |= 1 << v
    td = _td_from_order(g, order, bags_by_vertex)
    assert td.width == dp[full]
    return dp[full], td


def upper_bound(g):
    """Min-fill elimination heuristic with smallest-id tie-breaks.

    Deterministic; returns a valid decomposition whose width is at least
    the true treewidth.
    """
    n = g.n
    if n == 0:
        return -1, TreeDecomposition([-1], [frozenset()])
    adj = [set(g.neighbors(v)) for v in range(n)]
    remaining = set(range(n))

    def fill_count(v):
        nb = sorted(adj[v])
        cnt = 0
        for i in range(len(nb)):
            for j in range(i + 1, len(nb)):
                if nb[j] not in adj[nb[i]]:
                    cnt += 1
        return cnt

    fill = {v: fill_count(v) for v in remaining}
    order = []
    bags_by_vertex = {}
    while remaining:
        v = min(remaining, key=lambda u: (fill[u], u))
        nb = sorted(adj[v])
        bags_by_vertex[v] = frozenset([v] + nb)
        dirty = set(nb)
        for i in range(len(nb)):
            for j in range(i + 1, len(nb)):
                a, b = nb[i], nb[j]
                if b not in adj[a]:
                    adj[a].add(b)
                    adj[b].add(a)
                    dirty |= adj[a] | adj[b]
        for u in nb:
            adj[u].discard(v)
        remaining.discard(v)
        del fill[v]
        order.append(v)
        for u in dirty & remaining:
            fill[u] = fill_count(u)
    td = _td_from_order(g, order, bags_by_vertex)
    report = validate(td, g)
    assert report["ok"], "min-fill decomposition failed validation"
    return td.width, td


def lower_bound(g):
    """Treewidth lower bound: max of degeneracy and contraction degeneracy.

    The contraction pass (MMD+) repeatedly merges a minimum-degree vertex
    into its smallest-degree neighbor; the largest minimum degree seen is a
    lower bound because every intermediate graph is a minor.
    """
    best = 0 if g.n else -1

    adj = [set(g.neighbors(v)) for v in range(g.n)]
    remaining = set(range(g.n))
    while remaining:
        v = min(remaining, key=lambda u: (len(adj[u]), u))
        best = max(best, len(adj[v]))
        for u in adj[v]:
            adj[u].discard(v)
        adj[v] = set()
        remaining.discard(v)

    adj = [set(g.neighbors(v)) for v in range(g.n)]
    remaining = set(range(g.n))
    while len(remaining) > 1:
        v = min(remaining, key=lambda u: (len(adj[u]), u))
        best = max(best, len(adj[v]))
        if not adj[v]:
            remaining.discard(v)
            continue
        w = min(adj[v], key=lambda u: (len(adj[u]), u))
        for u in adj[v]:
            if u != w:
                adj[u].discard(v)
                adj[u].add(w)
                adj[w].add(u)
        adj[w].discard(v)
        adj[v] = set()
        remaining.discard(v)
    return best
