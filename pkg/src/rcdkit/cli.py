"""Command-line front door for generation, decomposition, and solving.

Every subcommand reads at most one JSON document from stdin and writes one
JSON document (or DOT/PACE text under the dedicated flags) to stdout, so
stages compose with ordinary shell pipes::

    rcdkit gen grid --m 5 | rcdkit decompose embedded --p 2 \\
        | rcdkit verify rcd --samples 20 --seed 7

Payloads are the ``to_json`` forms of the library types and parse back
losslessly.  ``decompose`` additionally stores the working graph under the
decomposition's ``meta``, so a piped decomposition carries enough context
to be verified on its own; ``verify td`` accepts the tree decomposition
either as JSON or as PACE-style ``.td`` text, and ``tw --pace`` emits that
text for interchange with external tools.

Exit codes follow the outcome: 0 when the command succeeds and any
requested check passes, 1 when a verifier emits a failing report, and 2
for usage problems -- malformed flags, stdin that is not JSON, or payloads
whose fields do not form the advertised artifact.  Subcommands that draw
random bits require an explicit ``--seed`` so reruns reproduce exactly;
``bench`` may fan its rows out over worker processes, each row seeded on
its own, which keeps the report independent of the level of parallelism.
"""

import argparse
import json
import math
import random
import sys
import time
from concurrent import futures

from .cliquesum import RsInput, combine, verify_connected_bottom
from .embedding import Embedding, is_minimal
from .generators import (apex_grid, clique_sum, grid, random_planar,
                         subdivided_grid, subdivided_grid_star)
from .graphs import Graph, is_connected
from .keylemma import compute_key_sets, verify_key_conditions
from .permcsp import (brute_force, encode_coc, encode_multiway, encode_oct,
                      subexp_solve)
from .rcd import (ApexStructure, Rcd, build_connectors, decompose_apex,
                  decompose_embedded, verify_rcd)
from .treedecomp import TreeDecomposition, from_td_text, to_td_text
from .treedecomp import validate as validate_td
from .treewidth import EXACT_LIMIT, exact_treewidth, lower_bound, upper_bound


class InputError(Exception):
    """Bad stdin payload or flag combination; reported on stderr, exit 2."""


def _read_json():
    text = sys.stdin.read()
    if not text.strip():
        raise InputError("expected a JSON document on stdin")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("stdin is not valid JSON: %s" % exc)


def _emit(obj):
    print(json.dumps(obj, indent=2))


def _csv_ints(text):
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise InputError("expected comma-separated integers, got %r" % text)


def _ceil_sqrt(k):
    return 0 if k == 0 else math.isqrt(k - 1) + 1


def _any_graph(obj):
    """Pull the underlying graph out of any artifact payload."""
    if not isinstance(obj, dict):
        raise InputError("stdin JSON must be an object")
    if "rotation" in obj:
        return Embedding.from_json(obj).graph
    if "apices" in obj:
        return ApexStructure.from_json(obj).graph
    if "torso_structs" in obj:
        return RsInput.from_json(obj).graph
    if "edges" in obj:
        return Graph.from_json(obj)
    if "graph" in obj:
        return Graph.from_json(obj["graph"])
    raise InputError("stdin JSON carries no graph")


def _class_dot(g, rcd, name="G"):
    """DOT text with each vertex labelled by its class (R = residue)."""
    label = {}
    for i, z in enumerate(rcd.classes):
        for v in z:
            label[v] = "Z%d" % (i + 1)
    lines = ["graph %s {" % name]
    for v in range(g.n):
        lines.append('  %d [label="%d %s"];' % (v, v, label.get(v, "R")))
    for u, v in g.edge_list():
        lines.append("  %d -- %d;" % (u, v))
    lines.append("}")
    return "\n".join(lines)


# -- gen ---------------------------------------------------------------------


def _cmd_gen_grid(args):
    emb = grid(args.m)
    if args.dot:
        print(emb.to_dot())
    else:
        _emit(emb.to_json())
    return 0


def _cmd_gen_subdivided_grid(args):
    emb = subdivided_grid(args.m)
    if args.dot:
        print(emb.to_dot())
    else:
        _emit(emb.to_json())
    return 0


def _cmd_gen_random_planar(args):
    emb = random_planar(args.n, args.seed, delete_fraction=args.delete_fraction)
    if args.dot:
        print(emb.to_dot())
    else:
        _emit(emb.to_json())
    return 0


def _cmd_gen_apex_grid(args):
    st = apex_grid(args.m, args.a)
    if args.dot:
        print(st.graph.to_dot())
    else:
        _emit(st.to_json())
    return 0


def _cmd_gen_cliquesum(args):
    rng = random.Random(args.seed)
    pieces = [grid(args.m) for _ in range(args.pieces)]
    adhesions = [(rng.randrange(child), child, rng.randint(1, 3))
                 for child in range(1, args.pieces)]
    rs = clique_sum(pieces, adhesions)
    if args.dot:
        print(rs.graph.to_dot())
    else:
        _emit(rs.to_json())
    return 0


def _cmd_gen_grid_star(args):
    rs = subdivided_grid_star(args.m)
    if args.dot:
        print(rs.graph.to_dot())
    else:
        _emit(rs.to_json())
    return 0


# -- decompose ---------------------------------------------------------------


def _decompose_out(args, g, rcd):
    if args.dot:
        print(_class_dot(g, rcd))
        return 0
    payload = rcd.to_json()
    payload["meta"]["graph"] = g.to_json()
    _emit(payload)
    return 0


def _cmd_decompose_embedded(args):
    emb = Embedding.from_json(_read_json())
    rcd = decompose_embedded(emb, args.p, frozenset(_csv_ints(args.phi)), h=args.h)
    return _decompose_out(args, emb.graph, rcd)


def _cmd_decompose_apex(args):
    st = ApexStructure.from_json(_read_json())
    rcd = decompose_apex(st, args.p, frozenset(_csv_ints(args.phi)))
    return _decompose_out(args, st.graph, rcd)


def _cmd_decompose_cliquesum(args):
    rs = RsInput.from_json(_read_json())
    rcd = combine(rs, args.p)
    return _decompose_out(args, rs.graph, rcd)


# -- verify ------------------------------------------------------------------


def _cmd_verify_embedding(args):
    obj = _read_json()
    try:
        emb = Embedding.from_json(obj)
    except ValueError as exc:
        _emit({"ok": False, "error": str(exc)})
        return 1
    g = emb.graph
    report = {
        "n": g.n,
        "edges": len(g.edges),
        "faces": emb.n_faces,
        "genus": emb.genus,
        "outer_face": emb.outer_face,
        "connected": is_connected(g),
        "minimal": is_minimal(emb),
        "euler": g.n - len(g.edges) + emb.n_faces == 2 - 2 * emb.genus,
    }
    report["ok"] = report["connected"] and report["minimal"] and report["euler"]
    _emit(report)
    return 0 if report["ok"] else 1


def _cmd_verify_td(args):
    obj = _read_json()
    if not isinstance(obj, dict) or "graph" not in obj or "td" not in obj:
        raise InputError('expected {"graph": ..., "td": ...} on stdin')
    try:
        g = Graph.from_json(obj["graph"])
        raw = obj["td"]
        if isinstance(raw, str):
            td = from_td_text(raw)
        else:
            td = TreeDecomposition.from_json(raw)
    except ValueError as exc:
        _emit({"ok": False, "error": str(exc)})
        return 1
    report = validate_td(td, g)
    report["width"] = max(len(b) for b in td.bags) - 1
    _emit(report)
    return 0 if report["ok"] else 1


def _cmd_verify_key_lemma(args):
    obj = _read_json()
    try:
        emb = Embedding.from_json(obj)
        phi = frozenset(_csv_ints(args.phi))
        conn = build_connectors(emb, phi, args.h)
    except ValueError as exc:
        _emit({"ok": False, "error": str(exc)})
        return 1
    layers = {}
    ok = True
    for t in sorted(conn.good):
        try:
            out = compute_key_sets(emb, t, conn.phis[t])
            rep = verify_key_conditions(emb, t, out)
        except ValueError as exc:
            rep = {"t": t, "ok": False, "error": str(exc)}
        layers[str(t)] = rep
        ok = ok and rep["ok"]
    _emit({"ok": ok, "bad_layers": sorted(conn.bad),
           "good_layers": sorted(conn.good), "layers": layers})
    return 0 if ok else 1


def _cmd_verify_rcd(args):
    obj = _read_json()
    if not isinstance(obj, dict):
        raise InputError("stdin JSON must be an object")
    try:
        if "rcd" in obj:
            rcd = Rcd.from_json(obj["rcd"])
            gobj = obj.get("graph") or rcd.meta.get("graph")
        else:
            rcd = Rcd.from_json(obj)
            gobj = rcd.meta.get("graph")
        if gobj is None:
            raise InputError('no graph found: pass {"graph": ..., "rcd": ...}'
                             " or pipe a decomposition whose meta carries its graph")
        g = Graph.from_json(gobj)
    except ValueError as exc:
        _emit({"ok": False, "error": str(exc)})
        return 1
    report = verify_rcd(g, rcd, args.samples, seed=args.seed, s_max=args.s_max,
                        strategy=args.strategy, threshold=args.threshold)
    _emit(report)
    return 0 if report["ok"] else 1


def _cmd_verify_connected_bottom(args):
    obj = _read_json()
    if not isinstance(obj, dict):
        raise InputError("stdin JSON must be an object")
    if args.rs:
        try:
            with open(args.rs) as fh:
                rs_obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError("cannot read %s: %s" % (args.rs, exc))
        rcd_obj = obj["rcd"] if "rcd" in obj else obj
    else:
        if "rs" not in obj or "rcd" not in obj:
            raise InputError('expected {"rs": ..., "rcd": ...} on stdin'
                             " (or pass --rs FILE with a piped decomposition)")
        rs_obj = obj["rs"]
        rcd_obj = obj["rcd"]
    try:
        rs = RsInput.from_json(rs_obj)
        rcd = Rcd.from_json(rcd_obj)
    except ValueError as exc:
        _emit({"ok": False, "error": str(exc)})
        return 1
    if "per_node" not in rcd.meta:
        _emit({"ok": False, "error": "decomposition lacks per-node torso classes"})
        return 1
    report = verify_connected_bottom(rs, rcd)
    _emit(report)
    return 0 if report["ok"] else 1


# -- tw ----------------------------------------------------------------------


def _tw_out(args, g, width, td):
    if args.pace:
        sys.stdout.write(to_td_text(td, g.n))
    else:
        _emit({"width": width, "td": td.to_json()})
    return 0


def _cmd_tw_exact(args):
    g = _any_graph(_read_json())
    width, td = exact_treewidth(g, limit=args.limit)
    return _tw_out(args, g, width, td)


def _cmd_tw_ub(args):
    g = _any_graph(_read_json())
    width, td = upper_bound(g)
    return _tw_out(args, g, width, td)


def _cmd_tw_lb(args):
    g = _any_graph(_read_json())
    _emit({"width": lower_bound(g)})
    return 0


# -- solve -------------------------------------------------------------------


def _solve_payload(obj):
    """Split a problem payload into graph, embedding/apex context, and rcd."""
    if not isinstance(obj, dict):
        raise InputError("stdin JSON must be an object")
    emb = st = rcd = g = None
    if "rotation" in obj:
        emb = Embedding.from_json(obj)
    elif "apices" in obj:
        st = ApexStructure.from_json(obj)
    elif "edges" in obj and "graph" not in obj:
        g = Graph.from_json(obj)
    else:
        if "embedding" in obj:
            emb = Embedding.from_json(obj["embedding"])
        if "apex" in obj:
            st = ApexStructure.from_json(obj["apex"])
        if "graph" in obj:
            g = Graph.from_json(obj["graph"])
        if "rcd" in obj:
            rcd = Rcd.from_json(obj["rcd"])
    if g is None and st is not None:
        g = st.graph
    if g is None and emb is not None:
        g = emb.graph
    if g is None:
        raise InputError("stdin JSON carries no graph, embedding, or apex structure")
    return g, emb, st, rcd


def _pipeline_rcd(emb, st, rcd, k):
    if rcd is not None:
        return rcd
    p = max(1, _ceil_sqrt(k))
    if st is not None:
        return decompose_apex(st, p, frozenset())
    if emb is not None:
        return decompose_embedded(emb, p, frozenset())
    raise InputError("pipeline mode needs an embedding, an apex structure,"
                     " or a precomputed decomposition on stdin")


def _cmd_solve(args):
    g, emb, st, rcd_in = _solve_payload(_read_json())
    if args.problem == "oct":
        inst, sc = encode_oct(g)
    elif args.problem == "mwc":
        inst, sc = encode_multiway(g, _csv_ints(args.terminals))
    else:
        inst, sc = encode_coc(g, args.delta)
    if args.brute:
        res = brute_force(inst, sc, args.k, args.mode)
    else:
        rcd = _pipeline_rcd(emb, st, rcd_in, args.k)
        res = subexp_solve(inst, sc, args.k, rcd, mode=args.mode,
                           minimize=args.minimize)
    _emit(res.to_json())
    return 0


# -- bench -------------------------------------------------------------------


def _bench_row(spec):
    """Generate, decompose, and sample-verify one instance; JSON-safe row."""
    kind = spec["kind"]
    size = spec["size"]
    seed = spec["seed"]
    p = spec["p"]
    t0 = time.perf_counter()
    if kind == "grid":
        emb = grid(size)
        g = emb.graph
        rcd = decompose_embedded(emb, p, frozenset())
    elif kind == "planar":
        emb = random_planar(max(size * size, 3), seed)
        g = emb.graph
        rcd = decompose_embedded(emb, p, frozenset())
    elif kind == "apex":
        st = apex_grid(size, 1)
        g = st.graph
        rcd = decompose_apex(st, p, frozenset())
    else:
        rs = clique_sum([grid(size), grid(size)], [(0, 1, 3)])
        g = rs.graph
        rcd = combine(rs, p)
    t1 = time.perf_counter()
    report = verify_rcd(g, rcd, spec["samples"], seed=seed)
    t2 = time.perf_counter()
    return {
        "kind": kind,
        "size": size,
        "seed": seed,
        "n": g.n,
        "edges": len(g.edges),
        "p": p,
        "classes": [len(z) for z in rcd.classes],
        "residue": len(rcd.residue),
        "max_ratio": report["max_ratio"],
        "ok": report["ok"],
        "decompose_ms": round((t1 - t0) * 1000.0, 3),
        "verify_ms": round((t2 - t1) * 1000.0, 3),
    }


_BENCH_KINDS = ("grid", "planar", "apex", "cliquesum")


def _cmd_bench(args):
    kinds = [part for part in args.kinds.split(",") if part]
    sizes = _csv_ints(args.sizes)
    for kind in kinds:
        if kind not in _BENCH_KINDS:
            raise InputError("unknown bench kind %r (choose from %s)"
                             % (kind, ", ".join(_BENCH_KINDS)))
    if not kinds or not sizes:
        raise InputError("bench needs at least one kind and one size")
    specs = []
    for kind in kinds:
        for size in sizes:
            specs.append({"kind": kind, "size": size, "p": args.p,
                          "samples": args.samples,
                          "seed": args.seed * 1000 + len(specs)})
    if args.jobs > 1:
        with futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_row, specs))
    else:
        rows = [_bench_row(spec) for spec in specs]
    ok = all(row["ok"] for row in rows)
    _emit({"ok": ok, "p": args.p, "samples": args.samples, "seed": args.seed,
           "rows": rows})
    return 0 if ok else 1


# -- parser ------------------------------------------------------------------


def _leaf(subparsers, name, handler, help_text):
    ps = subparsers.add_parser(name, help=help_text)
    ps.set_defaults(run=handler)
    return ps


def _add_solve_parser(sub, name, problem, help_text):
    ps = _leaf(sub, name, _cmd_solve, help_text)
    ps.set_defaults(problem=problem)
    ps.add_argument("--k", type=int, required=True, help="deletion budget")
    ps.add_argument("--mode", choices=("vertex", "edge"), default="vertex",
                    help="delete variables or constraints (default vertex)")
    group = ps.add_mutually_exclusive_group(required=True)
    group.add_argument("--pipeline", action="store_true",
                       help="guess-contract-decompose pipeline")
    group.add_argument("--brute", action="store_true",
                       help="exhaustive baseline (small instances only)")
    ps.add_argument("--minimize", action="store_true",
                    help="search for a minimum deletion instead of any")
    if problem == "mwc":
        ps.add_argument("--terminals", required=True,
                        help="comma-separated terminal vertices")
    if problem == "coc":
        ps.add_argument("--delta", type=int, required=True,
                        help="maximum surviving component order")
    return ps


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rcdkit",
        description="Robust contraction decompositions: generate, decompose,"
                    " verify, bound treewidth, and solve deletion problems."
                    "  Subcommands read one JSON document from stdin and"
                    " write one to stdout.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    gen = sub.add_parser("gen", help="emit a generated instance")
    gsub = gen.add_subparsers(dest="kind", required=True, metavar="kind")
    ps = _leaf(gsub, "grid", _cmd_gen_grid, "m x m grid embedding")
    ps.add_argument("--m", type=int, required=True, help="grid side")
    ps.add_argument("--dot", action="store_true", help="emit DOT text")
    ps = _leaf(gsub, "subdivided-grid", _cmd_gen_subdivided_grid,
               "grid with every edge subdivided once")
    ps.add_argument("--m", type=int, required=True, help="grid side")
    ps.add_argument("--dot", action="store_true", help="emit DOT text")
    ps = _leaf(gsub, "random-planar", _cmd_gen_random_planar,
               "seeded planar embedding")
    ps.add_argument("--n", type=int, required=True, help="vertex count")
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--delete-fraction", type=float, default=0.15,
                    help="fraction of edges to thin out (default 0.15)")
    ps.add_argument("--dot", action="store_true", help="emit DOT text")
    ps = _leaf(gsub, "apex-grid", _cmd_gen_apex_grid,
               "grid plus universal apex vertices")
    ps.add_argument("--m", type=int, required=True, help="grid side")
    ps.add_argument("--a", type=int, default=1, help="apex count (default 1)")
    ps.add_argument("--dot", action="store_true", help="emit DOT text")
    ps = _leaf(gsub, "cliquesum", _cmd_gen_cliquesum,
               "grids glued along random small adhesions")
    ps.add_argument("--m", type=int, required=True, help="grid side per piece")
    ps.add_argument("--pieces", type=int, default=2, help="piece count (default 2)")
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--dot", action="store_true", help="emit DOT text")
    ps = _leaf(gsub, "grid-star", _cmd_gen_grid_star,
               "subdivided grid with its one-bag-per-edge decomposition")
    ps.add_argument("--m", type=int, required=True, help="grid side")
    ps.add_argument("--dot", action="store_true", help="emit DOT text")

    dec = sub.add_parser("decompose", help="build a contraction decomposition")
    dsub = dec.add_subparsers(dest="kind", required=True, metavar="kind")
    ps = _leaf(dsub, "embedded", _cmd_decompose_embedded,
               "decompose an embedding from stdin")
    ps.add_argument("--p", type=int, required=True, help="class count")
    ps.add_argument("--phi", default="", help="protected vertices (comma list)")
    ps.add_argument("--h", type=int, default=0, help="apex allowance (default 0)")
    ps.add_argument("--dot", action="store_true",
                    help="emit DOT with class labels instead of JSON")
    ps = _leaf(dsub, "apex", _cmd_decompose_apex,
               "decompose an apex structure from stdin")
    ps.add_argument("--p", type=int, required=True, help="class count")
    ps.add_argument("--phi", default="", help="protected vertices (comma list)")
    ps.add_argument("--dot", action="store_true",
                    help="emit DOT with class labels instead of JSON")
    ps = _leaf(dsub, "cliquesum", _cmd_decompose_cliquesum,
               "combine per-torso decompositions of a clique-sum input")
    ps.add_argument("--p", type=int, required=True, help="class count")
    ps.add_argument("--dot", action="store_true",
                    help="emit DOT with class labels instead of JSON")

    ver = sub.add_parser("verify", help="check an artifact, exit 1 on failure")
    vsub = ver.add_subparsers(dest="kind", required=True, metavar="kind")
    _leaf(vsub, "embedding", _cmd_verify_embedding,
          "rotation system, connectivity, minimality, Euler count")
    _leaf(vsub, "td", _cmd_verify_td,
          'decomposition axioms for {"graph": ..., "td": ...}')
    ps = _leaf(vsub, "key-lemma", _cmd_verify_key_lemma,
               "per-layer withheld-set conditions on an embedding")
    ps.add_argument("--phi", default="", help="protected vertices (comma list)")
    ps.add_argument("--h", type=int, default=0, help="apex allowance (default 0)")
    ps = _leaf(vsub, "rcd", _cmd_verify_rcd,
               "sample contractions and report treewidth ratios")
    ps.add_argument("--samples", type=int, default=10,
                    help="number of sampled contractions (default 10)")
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--s-max", type=int, default=5, dest="s_max",
                    help="largest omitted set per sample (default 5)")
    ps.add_argument("--strategy", choices=("random", "cut"), default="random")
    ps.add_argument("--threshold", type=float, default=None,
                    help="fail when a ratio exceeds this bound")
    ps = _leaf(vsub, "connected-bottom", _cmd_verify_connected_bottom,
               "realize every per-torso class edge below its node")
    ps.add_argument("--rs", default=None, metavar="FILE",
                    help="clique-sum input JSON (when stdin has only the rcd)")

    tw = sub.add_parser("tw", help="treewidth bounds and certificates")
    tsub = tw.add_subparsers(dest="kind", required=True, metavar="kind")
    ps = _leaf(tsub, "exact", _cmd_tw_exact, "exact width by subset dynamics")
    ps.add_argument("--limit", type=int, default=EXACT_LIMIT,
                    help="largest allowed vertex count (default %d)" % EXACT_LIMIT)
    ps.add_argument("--pace", action="store_true",
                    help="emit PACE .td text instead of JSON")
    ps = _leaf(tsub, "ub", _cmd_tw_ub, "min-fill heuristic upper bound")
    ps.add_argument("--pace", action="store_true",
                    help="emit PACE .td text instead of JSON")
    _leaf(tsub, "lb", _cmd_tw_lb, "degeneracy-based lower bound")

    sol = sub.add_parser("solve", help="vertex/edge deletion problems")
    ssub = sol.add_subparsers(dest="kind", required=True, metavar="kind")
    _add_solve_parser(ssub, "oct", "oct", "odd cycle transversal")
    _add_solve_parser(ssub, "mwc", "mwc", "multiway cut")
    _add_solve_parser(ssub, "coc", "coc", "component order connectivity")

    ps = _leaf(sub, "bench", _cmd_bench,
               "decompose and sample-verify a sweep of instances")
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--p", type=int, default=2, help="class count (default 2)")
    ps.add_argument("--samples", type=int, default=4,
                    help="verification samples per instance (default 4)")
    ps.add_argument("--kinds", default="grid,planar,apex",
                    help="comma list from grid,planar,apex,cliquesum")
    ps.add_argument("--sizes", default="4,6", help="comma list of grid sides")
    ps.add_argument("--jobs", type=int, default=1,
                    help="worker processes (default 1)")

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.run(args)
    except InputError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
