"""``tdr`` command line: gen, build, query, bench, verify.

Exit status is 0 on success, 2 on usage errors (bad flags, bad pattern
syntax) and 1 on runtime errors. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
import time

from . import __version__
from .bench import generate_workload, run_bench
from .errors import PatternSyntaxError, TdrError
from .generators import generate_er, generate_pa
from .graph import Graph, load_edge_list, write_edge_list
from .index import IndexParams, build_index
from .oracle import oracle_pcr
from .pattern import bind, parse, random_pattern
from .query import SearchStats, engine_for
from .serialize import load_index, save_index

log = logging.getLogger("tdr")

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _pos_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tdr", description="Pattern-constrained reachability with the TDR index.")
    p.add_argument("--version", action="version", version=f"tdr {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a synthetic labeled graph")
    g.add_argument("--model", choices=("er", "pa"), required=True)
    g.add_argument("--n", type=_pos_int, required=True, help="vertex count")
    g.add_argument("--d", type=_nonneg_float, required=True, help="average out-degree")
    g.add_argument("--labels", type=_pos_int, required=True, help="label alphabet size")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True, help="edge-list file to write ('-' for stdout)")

    b = sub.add_parser("build", help="build an index for an edge-list graph")
    b.add_argument("--graph", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--k", type=int, default=IndexParams.k)
    b.add_argument("--group-size", type=int, default=IndexParams.group_size)
    b.add_argument("--max-groups", type=int, default=IndexParams.max_groups)
    b.add_argument("--vertex-bits", type=int, default=IndexParams.vertex_bits)
    b.add_argument("--label-bits", type=int, default=IndexParams.label_bits)
    b.add_argument("--exact-label-threshold", type=int, default=IndexParams.exact_label_threshold)
    b.add_argument("--locality-shift", type=int, default=IndexParams.locality_shift)
    b.add_argument("--no-locality", action="store_true", help="drop the locality hash bit")
    b.add_argument("--no-mixing", action="store_true", help="drop the mixing hash bit")
    b.add_argument("--seed", type=int)

    q = sub.add_parser("query", help="answer one PCR query")
    q.add_argument("--graph", required=True)
    q.add_argument("--index", required=True)
    q.add_argument("--source", required=True, help="vertex token as written in the graph file")
    q.add_argument("--target", required=True)
    q.add_argument("--pattern", required=True)
    q.add_argument("--stats", action="store_true", help="print search statistics to stderr")

    r = sub.add_parser("bench", help="generate a workload and time it")
    r.add_argument("--graph", required=True)
    r.add_argument("--index", required=True)
    r.add_argument("--kind", type=str.upper, choices=("AND", "OR", "NOT", "LCR"), required=True)
    r.add_argument("--labels-per-query", type=_nonneg_int, required=True)
    r.add_argument("--true", dest="quota_true", type=_nonneg_int, required=True)
    r.add_argument("--false", dest="quota_false", type=_nonneg_int, required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--baseline", choices=("oracle",))
    r.add_argument("--warmup", type=_nonneg_int, default=1, help="untimed rounds before timing")
    r.add_argument("--threads", type=_pos_int, default=1)
    r.add_argument("--max-attempts", type=_pos_int, default=100_000)
    r.add_argument("--dataset", help="tag for the report (default: graph file name)")
    r.add_argument("--out", required=True, help="CSV report path ('-' for stdout)")

    v = sub.add_parser("verify", help="randomized index-vs-oracle equivalence sweep")
    v.add_argument("--n-graphs", type=_pos_int, default=50)
    v.add_argument("--n-queries", type=_pos_int, default=100)
    v.add_argument("--seed", type=int)
    v.add_argument("--max-vertices", type=_pos_int, default=300)
    return p


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("TDR_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"TDR_SEED must be an integer, got {env!r}") from None


def _params(args, seed: int) -> IndexParams:
    try:
        return IndexParams(
            group_size=args.group_size,
            max_groups=args.max_groups,
            vertex_bits=args.vertex_bits,
            label_bits=args.label_bits,
            exact_label_threshold=args.exact_label_threshold,
            k=args.k,
            locality_shift=args.locality_shift,
            seeds=(seed, seed ^ IndexParams.seeds[1]),
            use_locality=not args.no_locality,
            use_mixing=not args.no_mixing,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_graph(path: str) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def _open_out(path: str):
    return sys.stdout if path == "-" else open(path, "w", encoding="utf-8", newline="")


def cmd_gen(args) -> int:
    seed = _seed(args)
    make = generate_er if args.model == "er" else generate_pa
    graph = make(args.n, args.d, args.labels, seed)
    header = f"model={args.model} n={args.n} d={args.d} labels={args.labels} seed={seed}"
    out = _open_out(args.out)
    try:
        write_edge_list(graph, out, header=header)
    finally:
        if out is not sys.stdout:
            out.close()
    log.info("generated %r", graph)
    return 0


def cmd_build(args) -> int:
    params = _params(args, _seed(args))
    graph = _load_graph(args.graph)
    index = build_index(graph, params)
    save_index(index, args.out)
    s = index.stats()
    print(f"built index for {graph!r}: {s['index_bytes']} bytes, {s['groups']} groups, {index.build_seconds:.3f}s")
    return 0


def cmd_query(args) -> int:
    try:
        ast = parse(args.pattern)
    except PatternSyntaxError as exc:
        raise UsageError(f"bad pattern: {exc}") from None
    graph = _load_graph(args.graph)
    index = load_index(args.index)
    try:
        u, v = graph.vertex_id(args.source), graph.vertex_id(args.target)
    except KeyError as exc:
        raise TdrError(exc.args[0]) from None
    bound, unknown = bind(ast, graph.label_ids)
    for name in sorted(unknown, key=str):
        print(f"warning: label {name!r} does not occur in the graph", file=sys.stderr)
    engine = engine_for(graph, index)
    stats = SearchStats()
    answer = engine.pcr_query(u, v, engine.clauses_for(bound), stats=stats)
    print("reachable" if answer else "unreachable")
    if args.stats:
        print(
            f"visited={stats.visited} pruned_groups={stats.pruned_groups} "
            f"clauses={stats.clauses} elapsed_us={stats.elapsed_us:.1f}",
            file=sys.stderr,
        )
    return 0


def cmd_bench(args) -> int:
    seed = _seed(args)
    graph = _load_graph(args.graph)
    if args.labels_per_query > graph.label_count:
        raise UsageError(f"--labels-per-query exceeds the graph's {graph.label_count} labels")
    index = load_index(args.index)
    workload = generate_workload(
        graph, args.kind, args.labels_per_query, args.quota_true, args.quota_false, seed, args.max_attempts
    )
    dataset = args.dataset or os.path.basename(args.graph)
    report = run_bench(
        graph, index, workload, args.warmup, dataset=dataset, baseline=args.baseline, threads=args.threads, seed=seed
    )
    out = _open_out(args.out)
    try:
        out.write(report.to_csv())
    finally:
        if out is not sys.stdout:
            out.close()
    if args.out != "-":
        print(report.to_table())
    return 0


def verify_sweep(n_graphs: int, n_queries: int, seed: int, max_vertices: int = 300) -> tuple[int, int]:
    """(mismatches, queries) over random ER/PA graphs and random patterns."""
    rng = random.Random(seed)
    mismatches = total = 0
    for gi in range(n_graphs):
        n = rng.randint(2, max_vertices)
        d = min(rng.uniform(0.5, 4.0), n - 1)
        labels = rng.randint(1, 8)
        make = generate_er if gi % 2 == 0 else generate_pa
        graph = make(n, d, labels, rng.randrange(2**31))
        params = IndexParams(k=rng.randint(1, 4), group_size=rng.randint(1, 6), max_groups=rng.choice((1, 2, 4, 8)))
        index = build_index(graph, params)
        engine = engine_for(graph, index)
        names = list(graph.label_names)
        for _ in range(n_queries):
            u, v = rng.randrange(n), rng.randrange(n)
            clauses = engine.clauses_for(random_pattern(rng, names, 4))
            total += 1
            if engine.pcr_query(u, v, clauses) != oracle_pcr(graph, u, v, clauses):
                mismatches += 1
                log.warning("mismatch: graph %d, %d->%d, %r", gi, u, v, clauses)
    return mismatches, total


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    mismatches, total = verify_sweep(args.n_graphs, args.n_queries, _seed(args), args.max_vertices)
    print(f"mismatches: {mismatches} of {total} queries ({time.perf_counter() - t0:.1f}s)")
    return 0 if mismatches == 0 else 1


COMMANDS = {"gen": cmd_gen, "build": cmd_build, "query": cmd_query, "bench": cmd_bench, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"tdr {args.command}: {exc}", file=sys.stderr)
        return 2
    except (TdrError, OSError, ValueError) as exc:
        print(f"tdr {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
