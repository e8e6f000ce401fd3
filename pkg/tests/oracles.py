"""Independent reference implementations used to freeze expected test values.

Everything here is deliberately brute-force and shares no code with the
package: treewidth by elimination orders, face counting with the mirror
orientation, and boundary-pair classification by exhaustive path
enumeration.  Slow on purpose; only run on small instances.
"""

from itertools import permutations


def all_simple_paths(adj, source):
    """Yield every simple path starting at source, trivial path included."""
    path = [source]
    on_path = {source}

    def walk():
        yield tuple(path)
        for y in sorted(adj.get(path[-1], ())):
            if y in on_path:
                continue
            path.append(y)
            on_path.add(y)
            yield from walk()
            on_path.discard(y)
            path.pop()

    yield from walk()


def path_endpoints(boundary_edges, avoid_edges, source):
    """Endpoints of all simple paths from source avoiding the given edges."""
    avoid = {(u, v) if u < v else (v, u) for u, v in avoid_edges}
    adj = {}
    for u, v in boundary_edges:
        e = (u, v) if u < v else (v, u)
        if e in avoid:
            continue
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return {p[-1] for p in all_simple_paths(adj, source)}


def classify_pair_by_paths(boundary_edges, face_edges, face_vertices,
                           singular_inner, exits, f, v):
    """Classify the pair (f, v) straight from the definitions.

    face_edges / face_vertices map every inner face of the layer boundary
    to its boundary edge and vertex sets; singular_inner lists the inner
    faces whose boundary is disconnected.  Returns one of the four class
    names used by the package.
    """
    ends = path_endpoints(boundary_edges, face_edges[f], v)
    if ends & (set(face_vertices[f]) - {v}):
        return "SingularTypeI"
    for fp in singular_inner:
        if fp != f and ends & set(face_vertices[fp]):
            return "SingularTypeII"
    if ends & set(exits):
        return "Critical"
    return "Normal"


def tw_by_elimination(n, edges):
    """Exact treewidth by branch and bound over elimination orders."""
    if n == 0:
        return -1
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    best = [n - 1]

    def go(live, neigh, width):
        if width >= best[0]:
            return
        if len(live) <= 1:
            best[0] = width
            return
        for v in sorted(live):
            nv = neigh[v] & live
            w = max(width, len(nv))
            if w >= best[0]:
                continue
            nxt = {u: set(neigh[u]) for u in live if u != v}
            for a in nv:
                nxt[a] |= nv - {a}
                nxt[a].discard(v)
            go(live - {v}, nxt, w)

    go(frozenset(range(n)), {v: set(adj[v]) for v in range(n)}, 0)
    return best[0]


def face_count_mirror(n, edges, rotation):
    """Count faces by tracing with the mirrored next-dart rule.

    The mirror embedding (every rotation reversed) has the same face count,
    so tracing predecessor-of-reverse instead of successor-of-reverse must
    agree with the package's count.  Darts are (edge, end) pairs; isolated
    vertices add one face each.
    """
    pred = {}
    for v in range(n):
        row = [tuple(d) for d in rotation[v]]
        for i, d in enumerate(row):
            pred[d] = row[(i - 1) % len(row)]
    count = 0
    seen = set()
    for start in sorted(pred):
        if start in seen:
            continue
        count += 1
        d = start
        while True:
            seen.add(d)
            e, end = d
            rev = (e, 1 - end)
            d = pred[rev]
            if d == start:
                break
    count += sum(1 for v in range(n) if not rotation[v])
    return count


def induced_components(edges, keep):
    """Components of the subgraph induced on keep, as a list of frozensets."""
    keep = set(keep)
    adj = {v: set() for v in keep}
    for u, v in edges:
        if u in keep and v in keep:
            adj[u].add(v)
            adj[v].add(u)
    out = []
    seen = set()
    for v in sorted(keep):
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def residue_classes_mirror(layers, bad, xs, lplus, p, c, h):
    """Re-derive the residue classes from layer and connector data.

    Given the layers (list of sets, index 0 is layer 1), the bad layer
    indices, and the per-layer withheld sets, recompute the spacing, the
    surviving residues, and the resulting classes directly from their
    definitions.
    """
    delta = p + 3 * c + 4 * h + 1
    bad_res = {((t - 1) % delta) + 1 for t in bad}
    good_res = [q for q in range(1, delta + 1) if q not in bad_res]
    assert len(good_res) >= p
    out = []
    for q in good_res[:p]:
        z = set()
        t = q
        while t <= len(layers):
            z |= set(layers[t - 1]) - set(xs[t]) - set(lplus.get(t, ()))
            t += delta
        out.append(frozenset(z))
    return delta, good_res[:p], out


def brute_minimum_deletion(n, edges, candidates, feasible, max_size):
    """Smallest feasible deletion set by exhaustive subset search.

    Tries candidate subsets in order of size then lexicographically and
    returns the first one accepted by the feasible predicate, or None.
    """
    from itertools import combinations

    cand = sorted(candidates)
    for k in range(0, max_size + 1):
        for sub in combinations(cand, k):
            if feasible(set(sub)):
                return set(sub)
    return None
