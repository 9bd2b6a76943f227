"""Command-line front end.

Exit codes: 0 success, 1 invalid or oversized CFG, 2 parse error,
3 verification or inference-domain failure.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from collections import Counter

from mincov import kernels
from mincov.cfg import parse_cfg, serialize_cfg, to_dot, validate
from mincov.domtree import build_oracle
from mincov.errors import (CfgParseError, DomainMismatchError,
                           InvalidCfgError, SizeGuardError)
from mincov.generators import (gen_corpus, gen_diamond_chain, gen_layered,
                               gen_random, gen_selfloop_path)
from mincov.inference import EDGE, NODE
from mincov.oracle import (impossibility_witness, is_valid_scheme, min_size,
                           trace_edge_profile, trace_vertex_profile,
                           walk_nodes)
from mincov.serialize import (dump_scheme, edge_triple, evaluate_document,
                              format_profile, load_scheme_document,
                              parse_profile)
from mincov.solve_ee import optimal_ee
from mincov.solve_ve import approx_ve
from mincov.solve_vv import optimal_vv

SOLVERS = {"vv": optimal_vv, "ee": optimal_ee, "ve": approx_ve}

FAMILIES = {
    "diamond-chain": lambda args: gen_diamond_chain(args.blocks),
    "selfloop-path": lambda args: gen_selfloop_path(args.length),
    "layered": lambda args: gen_layered([int(w) for w in args.widths.split(",")]),
    "random": lambda args: gen_random(args.nodes, args.edge_prob, args.seed),
}


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fp:
        return fp.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fp:
            fp.write(text)


def _load_cfg(path: str):
    cfg = parse_cfg(_read(path))
    report = validate(cfg)
    if not report.ok:
        raise InvalidCfgError(report)
    return cfg


def cmd_analyze(args) -> int:
    cfg = _load_cfg(args.input)
    scheme = SOLVERS[args.mode](cfg)
    _write(args.output, dump_scheme(scheme, cfg))
    stats = scheme.stats
    total = stats["node_count"] if args.mode == "vv" else stats["edge_count"]
    what = "nodes" if args.mode == "vv" else "edges"
    print(f"mode {args.mode}: {scheme.probe_count} probes over {total} {what} "
          f"({100.0 * scheme.probe_count / total:.1f}% instrumented), "
          f"{stats['path_component_count']} path components", file=sys.stderr)
    return 0


def cmd_infer(args) -> int:
    doc = load_scheme_document(_read(args.scheme))
    partial = parse_profile(_read(args.profile))
    values = evaluate_document(doc, partial)
    if doc["mode"] == "ve":
        values = [(key, val) for key, val in values if key[0] == NODE]
    _write(args.output, format_profile(values))
    return 0


def cmd_verify(args) -> int:
    if args.corpus:
        return _verify_corpus(args)
    if args.input is None:
        print("error: verify needs an input file (or --corpus)", file=sys.stderr)
        return 2
    cfg = _load_cfg(args.input)
    scheme = SOLVERS[args.mode](cfg)
    valid = is_valid_scheme(cfg, scheme.probes, args.mode)
    best = min_size(cfg, args.mode)
    print(f"mode {args.mode}: probes {scheme.probe_count}, "
          f"oracle minimum {best}, valid {'yes' if valid else 'NO'}")
    ok = valid
    if args.mode in ("vv", "ee"):
        ok = ok and scheme.probe_count == best
        verdict = "optimal" if scheme.probe_count == best else "NOT optimal"
        print(f"size check: {scheme.probe_count} vs {best} ({verdict})")
    else:
        ok = ok and scheme.probe_count <= 2 * best
        print(f"approximation check: {scheme.probe_count} <= 2*{best}: "
              f"{'yes' if scheme.probe_count <= 2 * best else 'NO'}")
        print(f"fallbacks: chain={scheme.stats['chain_fallbacks']} "
              f"cycle={scheme.stats['cycle_repairs']}")
    return 0 if ok else 3


def _verify_corpus(args) -> int:
    corpus = gen_corpus(args.count, args.seed, max_nodes=args.max_nodes)
    fractions = []
    for cfg in corpus:
        scheme = SOLVERS[args.mode](cfg)
        total = cfg.node_count if args.mode == "vv" else cfg.edge_count
        fractions.append(scheme.probe_count / total)
    fractions.sort()
    qs = statistics.quantiles(fractions, n=4)
    print(f"instrumented fraction over {len(corpus)} random graphs "
          f"(mode {args.mode}, seed {args.seed}):")
    print(f"  mean {statistics.fmean(fractions):.3f}  min {fractions[0]:.3f}  "
          f"p25 {qs[0]:.3f}  median {qs[1]:.3f}  p75 {qs[2]:.3f}  "
          f"max {fractions[-1]:.3f}")
    return 0


def cmd_gen(args) -> int:
    cfg = FAMILIES[args.family](args)
    _write(args.output, serialize_cfg(cfg))
    return 0


def cmd_dot(args) -> int:
    cfg = _load_cfg(args.input)
    highlight_nodes = []
    highlight_edges = []
    if args.scheme:
        doc = load_scheme_document(_read(args.scheme))
        for probe in doc["probes"]:
            if isinstance(probe, str):
                highlight_nodes.append(cfg.node_id(probe))
            else:
                src, dst, occ = cfg.node_id(probe[0]), cfg.node_id(probe[1]), probe[2]
                for e in cfg.out_edge_ids(src):
                    if int(cfg.edge_dst[e]) == dst and int(cfg.edge_occurrence[e]) == occ:
                        highlight_edges.append(e)
    _write(args.output, to_dot(cfg, highlight_nodes, highlight_edges))
    return 0


def cmd_stats(args) -> int:
    cfg = _load_cfg(args.input)
    oracle = build_oracle(cfg)
    for name, tree in (("dominator", oracle.dom), ("post-dominator", oracle.pdom)):
        hist = Counter(int(d) for d in tree.depths if d >= 0)
        print(f"{name} tree depth histogram "
              f"(max {max(hist) if hist else 0}):")
        for depth in sorted(hist):
            print(f"  depth {depth}: {hist[depth]}")
    return 0


def cmd_demo_impossibility(args) -> int:
    cfg = _load_cfg(args.input) if args.input else gen_layered([1, 2, 2, 1])
    witness = impossibility_witness(cfg)
    if witness is None:
        print("no witness: vertex coverage determines edge coverage on this graph")
        return 0
    print("two traces with identical vertex coverage but different edge coverage:")
    for tag, trace in zip("AB", witness):
        print(f"trace {tag}:")
        for walk in trace.walks:
            print("  walk: " + " -> ".join(cfg.label(v) for v in walk_nodes(cfg, walk)))
        vertices = sorted(cfg.label(v) for v in trace_vertex_profile(cfg, trace))
        edges = sorted("{}>{}#{}".format(*edge_triple(cfg, e))
                       for e in trace_edge_profile(trace))
        print("  vertices: " + " ".join(vertices))
        print("  edges:    " + " ".join(edges))
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = list(kernels.available_backends()) if args.backend == "both" \
        else [args.backend]
    maker = {"diamond-chain": gen_diamond_chain,
             "selfloop-path": gen_selfloop_path}[args.family]
    print(f"{'k':>9} {'nodes':>9} {'edges':>9} {'backend':>9} "
          f"{'best_s':>9} {'probes':>9}")
    for k in sizes:
        cfg = maker(k)
        for name in backends:
            with kernels.backend(name):
                best = None
                scheme = None
                for _ in range(args.repeat + 1):  # first run warms the pages
                    del scheme
                    t0 = time.perf_counter()
                    scheme = optimal_vv(cfg)
                    dt = time.perf_counter() - t0
                    best = dt if best is None else min(best, dt)
                print(f"{k:>9} {cfg.node_count:>9} {cfg.edge_count:>9} "
                      f"{name:>9} {best:>9.3f} {scheme.probe_count:>9}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mincov",
        description="minimum coverage instrumentation planning for CFGs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute an instrumentation scheme")
    p.add_argument("input")
    p.add_argument("--mode", choices=sorted(SOLVERS), default="vv")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("infer", help="reconstruct a full profile from probe values")
    p.add_argument("scheme")
    p.add_argument("profile")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("verify", help="check a scheme against the brute-force oracle")
    p.add_argument("input", nargs="?")
    p.add_argument("--mode", choices=sorted(SOLVERS), default="vv")
    p.add_argument("--corpus", action="store_true",
                   help="report probe-fraction distribution over a random corpus")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--max-nodes", type=int, default=10)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="emit a generated CFG")
    fam = p.add_subparsers(dest="family", required=True)
    q = fam.add_parser("diamond-chain")
    q.add_argument("--blocks", type=int, required=True)
    q = fam.add_parser("selfloop-path")
    q.add_argument("--length", type=int, required=True)
    q = fam.add_parser("layered")
    q.add_argument("--widths", required=True, help="comma-separated layer sizes")
    q = fam.add_parser("random")
    q.add_argument("--nodes", type=int, required=True)
    q.add_argument("--edge-prob", type=float, default=0.3)
    q.add_argument("--seed", type=int, default=0)
    for q in fam.choices.values():
        q.add_argument("-o", "--output", default=None)
        q.set_defaults(func=cmd_gen)

    p = sub.add_parser("dot", help="GraphViz rendering, optionally with a scheme")
    p.add_argument("input")
    p.add_argument("--scheme", default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("stats", help="dominator tree depth histograms")
    p.add_argument("input")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("demo-impossibility",
                       help="show traces that vertex coverage cannot distinguish")
    p.add_argument("--input", default=None,
                   help="CFG file (default: the layered 1,2,2,1 example)")
    p.set_defaults(func=cmd_demo_impossibility)

    p = sub.add_parser("bench", help="time the analyzer across sizes and backends")
    p.add_argument("--family", choices=("diamond-chain", "selfloop-path"),
                   default="diamond-chain")
    p.add_argument("--sizes", default="25000,50000,100000")
    p.add_argument("--backend", choices=("both",) + kernels.available_backends(),
                   default="both")
    p.add_argument("--repeat", type=int, default=2)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CfgParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (InvalidCfgError, SizeGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DomainMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
