"""Permutation CSP deletion via guessing, contraction, and tree DP.

A permutation CSP couples variables through binary relations in which every
value has at most one partner in either direction, so fixing one variable
propagates along any connected set of constraints and leaves at most d
candidate assignments per component.  Deletion asks for at most k variables
(vertex mode) or constraints (edge mode) whose removal makes every connected
component of the constraint graph satisfiable subject to a size constraint
(w, delta): the weights of the chosen values, summed over a component, may
not exceed delta.

The solver mirrors that structure.  A contraction decomposition of the
constraint graph with p = ceil(sqrt(k)) classes guarantees that some class
meets an optimal solution in few vertices.  For every class and every small
guessed intersection, the rest of the class is declared undeletable and
contracted; each contracted component behaves as a single super-variable
restricted to its propagated assignments.  A dynamic program over a tree
decomposition of the contracted graph then finds a minimum deletion avoiding
the undeletable part.  Bag states record per-vertex status (deleted, or one
of the candidate assignments); when the threshold is binding the states also
carry the partition of active bag vertices into connected blocks with
accumulated weights, so per-component budgets are enforced exactly.  Every
constraint is settled at the unique moment its first endpoint is forgotten,
which charges each edge-mode deletion exactly once.

Encodings are provided for odd cycle transversal (two values under
disequality), multiway cut (terminal-distinguishing values under equality,
wrong labels priced above a zero threshold), and component order
connectivity (unit weights, so component size equals assignment weight).  A
brute-force search over deletion sets serves as the ground-truth oracle at
small scale.
"""

from __future__ import annotations

import itertools
import math

from .graphs import Graph, contract_set
from .treedecomp import validate
from .treewidth import upper_bound

_DELETED = -1


def _check_mode(mode):
    if mode not in ("vertex", "edge"):
        raise ValueError("mode must be 'vertex' or 'edge', got %r" % (mode,))


def _ceil_sqrt(k):
    r = math.isqrt(k)
    return r if r * r == k else r + 1


class PermCspInstance:
    """Binary CSP whose every relation has the permutation property.

    Variables are dense ids 0..n-1 and the domain is 0..d-1.  Each
    constraint (x, y, R) relates two distinct variables through a relation
    R in which every value has at most one partner per direction, so an
    assigned variable forces its constrained neighbors.  The derived graph
    joins x and y whenever some constraint couples them; the size measure
    of an instance is n + d.
    """

    __slots__ = ("n", "d", "constraints", "graph")

    def __init__(self, n, d, constraints=()):
        if n < 0:
            raise ValueError("variable count must be nonnegative")
        if d < 1:
            raise ValueError("domain must hold at least one value")
        norm = []
        for idx, (x, y, rel) in enumerate(constraints):
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError("constraint %d is out of range for %d variables" % (idx, n))
            if x == y:
                raise ValueError("constraint %d relates variable %d to itself" % (idx, x))
            pairs = frozenset((int(a), int(b)) for a, b in rel)
            fwd = set()
            bwd = set()
            for a, b in pairs:
                if not (0 <= a < d and 0 <= b < d):
                    raise ValueError("constraint %d uses values outside the domain" % idx)
                if a in fwd:
                    raise ValueError("constraint %d pairs value %d with two partners" % (idx, a))
                if b in bwd:
                    raise ValueError("constraint %d pairs two values with %d" % (idx, b))
                fwd.add(a)
                bwd.add(b)
            norm.append((x, y, pairs))
        self.n = n
        self.d = d
        self.constraints = tuple(norm)
        self.graph = Graph(n, {(x, y) for x, y, _ in norm})

    @property
    def size(self):
        return self.n + self.d

    def minus_variables(self, xs):
        """Instance on the surviving variables, renumbered by rank.

        Returns (instance, kept) where kept[new] is the old variable id.
        """
        dead = set(xs)
        for v in dead:
            if not (0 <= v < self.n):
                raise ValueError("variable %d out of range" % v)
        kept = tuple(v for v in range(self.n) if v not in dead)
        rank = {v: i for i, v in enumerate(kept)}
        cons = [
            (rank[x], rank[y], rel)
            for x, y, rel in self.constraints
            if x not in dead and y not in dead
        ]
        return PermCspInstance(len(kept), self.d, cons), kept

    def minus_constraints(self, indices):
        """Instance without the given constraints, variables unchanged."""
        dead = set(indices)
        for i in dead:
            if not (0 <= i < len(self.constraints)):
                raise ValueError("constraint index %d out of range" % i)
        cons = [c for i, c in enumerate(self.constraints) if i not in dead]
        return PermCspInstance(self.n, self.d, cons)

    def __repr__(self):
        return "PermCspInstance(n=%d, d=%d, constraints=%d)" % (
            self.n,
            self.d,
            len(self.constraints),
        )

    def to_json(self):
        return {
            "n": self.n,
            "d": self.d,
            "constraints": [
                [x, y, [list(p) for p in sorted(rel)]] for x, y, rel in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, obj):
        cons = [
            (int(x), int(y), [(int(a), int(b)) for a, b in rel])
            for x, y, rel in obj["constraints"]
        ]
        return cls(int(obj["n"]), int(obj["d"]), cons)


class SizeConstraint:
    """Weight on (variable, value) pairs plus a per-component threshold.

    An assignment respects the constraint when its weights sum to at most
    delta; the solver applies this bound separately to every connected
    component that survives deletion.  Zero weights are dropped, so the
    stored mapping holds only the pairs that actually cost something.
    """

    __slots__ = ("weights", "delta")

    def __init__(self, weights, delta):
        if delta < 0:
            raise ValueError("threshold must be nonnegative")
        norm = {}
        for (x, a), w in dict(weights).items():
            if w < 0:
                raise ValueError("weight of (%d, %d) must be nonnegative" % (x, a))
            if w:
                norm[(int(x), int(a))] = int(w)
        self.weights = norm
        self.delta = int(delta)

    def weight(self, x, a):
        return self.weights.get((x, a), 0)

    def respected(self, assignment):
        return sum(self.weight(x, a) for x, a in assignment.items()) <= self.delta

    def __repr__(self):
        return "SizeConstraint(delta=%d, nonzero=%d)" % (self.delta, len(self.weights))

    def to_json(self):
        return {
            "weights": [[x, a, w] for (x, a), w in sorted(self.weights.items())],
            "delta": self.delta,
        }

    @classmethod
    def from_json(cls, obj):
        weights = {(int(x), int(a)): int(w) for x, a, w in obj["weights"]}
        return cls(weights, int(obj["delta"]))


class DeletionSolution:
    """A deletion set within budget: variable ids or constraint indices."""

    __slots__ = ("mode", "deleted", "k")

    def __init__(self, mode, deleted, k):
        _check_mode(mode)
        deleted = frozenset(int(v) for v in deleted)
        if len(deleted) > k:
            raise ValueError("deletion of size %d exceeds the budget k=%d" % (len(deleted), k))
        self.mode = mode
        self.deleted = deleted
        self.k = int(k)

    def __repr__(self):
        return "DeletionSolution(mode=%r, deleted=%s, k=%d)" % (
            self.mode,
            sorted(self.deleted),
            self.k,
        )

    def to_json(self):
        return {
            "feasible": True,
            "mode": self.mode,
            "deleted": sorted(self.deleted),
            "k": self.k,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(obj["mode"], [int(v) for v in obj["deleted"]], int(obj["k"]))


class Infeasible:
    """Verdict that no deletion within the budget exists."""

    __slots__ = ("mode", "k")

    def __init__(self, mode, k):
        _check_mode(mode)
        self.mode = mode
        self.k = int(k)

    def __repr__(self):
        return "Infeasible(mode=%r, k=%d)" % (self.mode, self.k)

    def to_json(self):
        return {"feasible": False, "mode": self.mode, "k": self.k}


def encode_oct(g):
    """Odd cycle transversal as disequality over a two-value domain.

    A component is satisfiable exactly when it is two-colorable, so the
    instance minus a deletion set is satisfiable on every component exactly
    when the remaining graph has no odd cycle.  The size constraint is
    trivial (all weights zero, threshold zero).
    """
    diseq = ((0, 1), (1, 0))
    constraints = [(u, v, diseq) for u, v in g.edge_list()]
    return PermCspInstance(g.n, 2, constraints), SizeConstraint({}, 0)


def encode_multiway(g, terminals):
    """Multiway cut as equality constraints with priced terminal labels.

    Every edge forces its endpoints to share a value, so a surviving
    component is constant-valued.  Terminal i weighs nothing under value i
    and one unit under any other value; with threshold zero a component can
    therefore host at most one terminal, whose index picks the component's
    value.  Deleting enough vertices (or constraints) to separate the
    terminals is exactly what makes every component satisfiable.
    """
    terms = sorted(set(terminals))
    for t in terms:
        if not (0 <= t < g.n):
            raise ValueError("terminal %d out of range" % t)
    d = max(1, len(terms))
    eq = tuple((a, a) for a in range(d))
    constraints = [(u, v, eq) for u, v in g.edge_list()]
    weights = {(t, a): 1 for i, t in enumerate(terms) for a in range(d) if a != i}
    return PermCspInstance(g.n, d, constraints), SizeConstraint(weights, 0)


def encode_coc(g, delta):
    """Component order connectivity: unit weights against a size threshold.

    The domain has one value and every relation accepts it, so each
    component carries exactly one satisfying assignment whose weight is the
    component's vertex count; the threshold delta bounds component order.
    """
    accept = ((0, 0),)
    constraints = [(u, v, accept) for u, v in g.edge_list()]
    weights = {(v, 0): 1 for v in range(g.n)}
    return PermCspInstance(g.n, 1, constraints), SizeConstraint(weights, delta)


def component_assignments(inst, y):
    """All satisfying assignments on a connected variable set, at most d.

    Seeds the smallest variable of y with each domain value in turn and
    propagates through the constraints induced on y; the permutation
    property forces every reachable variable, so each seed value yields at
    most one candidate.  Candidates violating any induced constraint are
    dropped.  Raises ValueError when y is empty, out of range, or not
    connected in the constraint graph.
    """
    verts = sorted(set(y))
    if not verts:
        raise ValueError("variable set is empty")
    for v in verts:
        if not (0 <= v < inst.n):
            raise ValueError("variable %d out of range" % v)
    members = set(verts)
    inside = [(x, z, rel) for x, z, rel in inst.constraints if x in members and z in members]
    adj = {v: [] for v in verts}
    for x, z, rel in inside:
        adj[x].append((z, {a: b for a, b in rel}))
        adj[z].append((x, {b: a for a, b in rel}))
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        u = stack.pop()
        for w, _ in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(verts):
        raise ValueError("variable set is not connected")
    out = []
    for seed in range(inst.d):
        alpha = {verts[0]: seed}
        stack = [verts[0]]
        ok = True
        while stack and ok:
            u = stack.pop()
            for w, table in adj[u]:
                forced = table.get(alpha[u])
                if forced is None:
                    ok = False
                    break
                cur = alpha.get(w)
                if cur is None:
                    alpha[w] = forced
                    stack.append(w)
                elif cur != forced:
                    ok = False
                    break
        if ok and all((alpha[x], alpha[z]) in rel for x, z, rel in inside):
            out.append(alpha)
    return tuple(out)


def component_satisfiable(inst, y, sc):
    """Whether some satisfying assignment on the connected set y respects sc."""
    for alpha in component_assignments(inst, y):
        if sc.respected(alpha):
            return True
    return False


def _induced_components(g, verts):
    allowed = set(verts)
    out = []
    seen = set()
    for v in sorted(allowed):
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for w in g.neighbors(x):
                if w in allowed and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(sorted(comp))
    return out


def deletion_feasible(inst, sc, deleted, mode):
    """Whether deleting the given variables or constraints satisfies everything.

    Vertex mode removes variables and their constraints; edge mode removes
    the constraints with the given indices.  Either way, every connected
    component of the surviving constraint graph must carry a satisfying
    assignment that respects the size constraint.
    """
    _check_mode(mode)
    if mode == "vertex":
        dead = set(deleted)
        for v in dead:
            if not (0 <= v < inst.n):
                raise ValueError("variable %d out of range" % v)
        active = [v for v in range(inst.n) if v not in dead]
        rest, comps = inst, _induced_components(inst.graph, active)
    else:
        rest = inst.minus_constraints(deleted)
        comps = _induced_components(rest.graph, range(rest.n))
    return all(component_satisfiable(rest, comp, sc) for comp in comps)


def brute_force(inst, sc, k, mode):
    """Exhaustive minimum deletion, the ground-truth oracle at small scale.

    Tries deletion sets in order of size and then lexicographically and
    returns the first feasible one, so the result is a true minimum.
    Limited to 14 variables in vertex mode and 18 constraints in edge mode.
    """
    _check_mode(mode)
    if k < 0:
        raise ValueError("budget must be nonnegative")
    if mode == "vertex":
        if inst.n > 14:
            raise ValueError("vertex brute force limited to 14 variables, got %d" % inst.n)
        universe = range(inst.n)
    else:
        if len(inst.constraints) > 18:
            raise ValueError(
                "edge brute force limited to 18 constraints, got %d" % len(inst.constraints)
            )
        universe = range(len(inst.constraints))
    universe = list(universe)
    for size in range(0, min(k, len(universe)) + 1):
        for sub in itertools.combinations(universe, size):
            if deletion_feasible(inst, sc, sub, mode):
                return DeletionSolution(mode, sub, k)
    return Infeasible(mode, k)


def dp_delete(inst, sc, td, q, k, mode, undeletable=frozenset()):
    """Minimum deletion by dynamic programming over a tree decomposition.

    q maps the instance's constraint graph onto the contracted graph that
    td decomposes.  Merged classes act as undeletable super-variables
    restricted to their propagated assignments; singleton classes listed in
    undeletable are pinned as well, and in edge mode every constraint
    touching an undeletable variable is pinned.  Returns the smallest
    deletion of size at most k — original variable ids in vertex mode,
    constraint indices in edge mode — or Infeasible when none exists.

    Bag states pair each contracted vertex with a status (deleted, or an
    index into its candidate assignments).  When some weight could
    accumulate without immediately breaching the threshold, states also
    carry the partition of active bag vertices into connected blocks with
    running weights; otherwise the partition is provably irrelevant and is
    skipped.  Constraints between two contracted vertices are settled when
    the first of them is forgotten, the only point where both statuses are
    known for the last time.
    """
    _check_mode(mode)
    if k < 0:
        raise ValueError("budget must be nonnegative")
    if q.source.n != inst.n or q.source.edges != inst.graph.edges:
        raise ValueError("quotient map does not start from the instance graph")
    undeletable = frozenset(undeletable)
    for v in undeletable:
        if not (0 <= v < inst.n):
            raise ValueError("undeletable variable %d out of range" % v)
    report = validate(td, q.target)
    if not report["ok"]:
        raise ValueError("tree decomposition is not valid for the contracted graph")

    classes = q.classes()
    budget = k
    delta = sc.delta
    # With no weight in (0, delta], a block either stays at weight zero or
    # dies the moment it gains weight, so tracking the partition is useless.
    local = all(w > delta for w in sc.weights.values())

    cand = []
    removable = []
    for members in classes:
        if len(members) == 1:
            v = members[0]
            states = [({v: a}, sc.weight(v, a)) for a in range(inst.d)]
            removable.append(mode == "vertex" and v not in undeletable)
        else:
            opts = component_assignments(inst, members)
            assert len(opts) <= inst.d
            states = [
                (alpha, sum(sc.weight(x, a) for x, a in alpha.items())) for alpha in opts
            ]
            removable.append(False)
        cand.append(states)

    bundles = {}
    img = q.image
    for idx, (x, y, rel) in enumerate(inst.constraints):
        s, t = img[x], img[y]
        if s == t:
            continue
        key = (s, t) if s < t else (t, s)
        can = x not in undeletable and y not in undeletable
        bundles.setdefault(key, []).append((idx, x, y, rel, can))

    def _absorb(states, key, wit):
        cur = states.get(key)
        if cur is None or len(wit) < len(cur):
            states[key] = wit

    def _introduce(states, bag, v):
        pos = 0
        while pos < len(bag) and bag[pos] < v:
            pos += 1
        nbag = bag[:pos] + (v,) + bag[pos:]
        out = {}
        orig = classes[v][0]
        for (st, blocks), wit in states.items():
            if removable[v] and len(wit) < budget:
                nk = (st[:pos] + (_DELETED,) + st[pos:], blocks)
                _absorb(out, nk, wit | {orig})
            for si, (_, wgt) in enumerate(cand[v]):
                if wgt > delta:
                    continue
                nst = st[:pos] + (si,) + st[pos:]
                if local:
                    _absorb(out, (nst, ()), wit)
                else:
                    nblocks = tuple(sorted(blocks + (((v,), wgt),)))
                    _absorb(out, (nst, nblocks), wit)
        return out, nbag

    def _settle_blocks(blocks, v, partners):
        # merge v's block with every partner's block, then retire v
        targets = {v, *partners}
        keep = []
        group = set()
        weight = 0
        for mem, w in blocks:
            if targets.intersection(mem):
                group.update(mem)
                weight += w
            else:
                keep.append((mem, w))
        if weight > delta:
            return None
        group.discard(v)
        if group:
            keep.append((tuple(sorted(group)), weight))
        return tuple(sorted(keep))

    def _forget(states, bag, v):
        pos = bag.index(v)
        nbag = bag[:pos] + bag[pos + 1 :]
        incident = []
        for j, u in enumerate(bag):
            if u == v:
                continue
            key = (v, u) if v < u else (u, v)
            blist = bundles.get(key)
            if blist:
                incident.append((j, u, blist))
        out = {}
        for (st, blocks), wit in states.items():
            nst = st[:pos] + st[pos + 1 :]
            sv = st[pos]
            if sv == _DELETED:
                _absorb(out, (nst, blocks), wit)
                continue
            alpha_v = cand[v][sv][0]
            dead = False
            per_edge = []
            for j, u, blist in incident:
                su = st[j]
                if su == _DELETED:
                    continue
                alpha_u = cand[u][su][0]
                sat_d = []
                unsat_d = []
                kept_undel = 0
                for idx, x, y, rel, can in blist:
                    a = alpha_v[x] if x in alpha_v else alpha_u[x]
                    b = alpha_v[y] if y in alpha_v else alpha_u[y]
                    good = (a, b) in rel
                    if mode == "vertex":
                        if not good:
                            dead = True
                            break
                    elif can:
                        (sat_d if good else unsat_d).append(idx)
                    elif good:
                        kept_undel += 1
                    else:
                        dead = True
                        break
                if dead:
                    break
                if mode == "vertex":
                    per_edge.append((u, (((), True),)))
                else:
                    keeps = kept_undel > 0 or bool(sat_d)
                    opts = [(tuple(unsat_d), keeps)]
                    # splitting a component by paying for satisfied
                    # constraints only matters under a live threshold
                    if not local and kept_undel == 0 and sat_d:
                        opts.append((tuple(unsat_d) + tuple(sat_d), False))
                    per_edge.append((u, tuple(opts)))
            if dead:
                continue
            for combo in itertools.product(*(opts for _, opts in per_edge)):
                extra = [i for chosen, _ in combo for i in chosen]
                wit2 = wit | frozenset(extra) if extra else wit
                if len(wit2) > budget:
                    continue
                if local:
                    _absorb(out, (nst, ()), wit2)
                    continue
                partners = [u for (u, _), (_, merge) in zip(per_edge, combo) if merge]
                nblocks = _settle_blocks(blocks, v, partners)
                if nblocks is None:
                    continue
                _absorb(out, (nst, nblocks), wit2)
        return out, nbag

    def _join_blocks(bag, st, ba, bb):
        posof = {u: i for i, u in enumerate(bag)}
        acc = [(set(mem), w) for mem, w in ba]
        for mem, w in bb:
            group = set(mem)
            total = w
            rest = []
            for am, aw in acc:
                if am & group:
                    group |= am
                    total += aw
                else:
                    rest.append((am, aw))
            rest.append((group, total))
            acc = rest
        out = []
        for group, total in acc:
            # each active bag vertex was introduced on both sides
            for u in group:
                total -= cand[u][st[posof[u]]][1]
            if total > delta:
                return None
            out.append((tuple(sorted(group)), total))
        return tuple(sorted(out))

    def _join(sa, sb, bag):
        out = {}
        grouped = {}
        for (st, blocks), wit in sb.items():
            grouped.setdefault(st, []).append((blocks, wit))
        for (st, ba), wa in sa.items():
            for bb, wb in grouped.get(st, ()):
                wit = wa | wb
                if len(wit) > budget:
                    continue
                if local:
                    _absorb(out, (st, ()), wit)
                    continue
                merged = _join_blocks(bag, st, ba, bb)
                if merged is None:
                    continue
                _absorb(out, (st, merged), wit)
        return out

    root = td.parent.index(-1)
    pre = [root]
    seen = 0
    while seen < len(pre):
        node = pre[seen]
        seen += 1
        pre.extend(td.children(node))
    empty = ((), ())
    results = {}
    for node in reversed(pre):
        mine = tuple(sorted(td.bags[node]))
        acc = None
        for child in td.children(node):
            cs, cb = results.pop(child)
            for u in [w for w in cb if w not in td.bags[node]]:
                cs, cb = _forget(cs, cb, u)
            for u in [w for w in mine if w not in set(cb)]:
                cs, cb = _introduce(cs, cb, u)
            acc = cs if acc is None else _join(acc, cs, mine)
        if acc is None:
            acc = {empty: frozenset()}
            cb = ()
            for u in mine:
                acc, cb = _introduce(acc, cb, u)
        results[node] = (acc, mine)

    states, bag = results[root]
    while bag:
        states, bag = _forget(states, bag, bag[0])
    wit = states.get(empty)
    if wit is None:
        return Infeasible(mode, k)
    return DeletionSolution(mode, wit, k)


def subexp_solve(inst, sc, k, rcd, mode="vertex", minimize=False):
    """Guess-contract-solve over the classes of a contraction decomposition.

    Some class meets a solution of size at most k in at most ceil(sqrt(k))
    vertices (twice that in edge mode, counting endpoints), so the guesses
    run over every class and every subset up to that bound, in increasing
    size and then lexicographic order.  Each guess pins the rest of the
    class as undeletable, contracts it, decomposes the quotient with the
    elimination heuristic, and runs the tree DP.  The first feasible answer
    is returned; with minimize=True the search instead exhausts all guesses
    and returns a minimum-size solution, shrinking the budget as it goes.
    """
    _check_mode(mode)
    if k < 0:
        raise ValueError("budget must be nonnegative")
    g = inst.graph
    for cls in rcd.classes:
        for v in cls:
            if not (0 <= v < g.n):
                raise ValueError("decomposition does not fit the instance graph")
    expected = max(1, _ceil_sqrt(k))
    if rcd.p != expected:
        raise ValueError("expected p=%d classes for k=%d, got %d" % (expected, k, rcd.p))
    bound = _ceil_sqrt(k) if mode == "vertex" else 2 * _ceil_sqrt(k)
    best = None
    for i in range(rcd.p):
        zi = sorted(rcd.classes[i])
        for size in range(0, min(bound, len(zi)) + 1):
            for guess in itertools.combinations(zi, size):
                budget = k if best is None else len(best.deleted) - 1
                if budget < 0:
                    return best
                undel = set(zi) - set(guess)
                target, q = contract_set(g, undel)
                td = upper_bound(target)[1]
                res = dp_delete(inst, sc, td, q, budget, mode, undeletable=undel)
                if isinstance(res, DeletionSolution):
                    if not minimize:
                        return res
                    if best is None or len(res.deleted) < len(best.deleted):
                        best = DeletionSolution(mode, res.deleted, k)
    if best is not None:
        return best
    return Infeasible(mode, k)
