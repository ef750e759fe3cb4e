"""Command-line harness: count, verify and scaling sweeps."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace

from .graph import Graph, GraphError, gen_forest_union, gen_gnm, load_edge_list
from .oracle import ORACLE_LIMIT, verify_run
from .primitives import ContractViolation
from .sim import SimError
from .triangles import count_triangles

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

REPORT_KEYS = ("n", "m", "delta", "S", "triangle_count", "rounds", "peak_machine_load",
               "peak_total_records", "machines_used", "alpha_lower", "alpha_upper")


class UsageError(Exception):
    pass


def _delta(text: str) -> float:
    try:
        d = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < d < 1.0:
        raise argparse.ArgumentTypeError("delta must lie in (0, 1)")
    return d


def _source_args(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    if not sweep:
        p.add_argument("--input", metavar="PATH", help="edge-list file ('-' for stdin)")
        p.add_argument("--n", type=int, help="vertex count for --gen")
    else:
        p.add_argument("--n", type=int, nargs="+", required=True, help="vertex counts")
    p.add_argument("--gen", choices=("forest-union", "gnm"), help="generate the graph instead")
    p.add_argument("--k", type=int, default=3, help="forests for forest-union (default 3)")
    p.add_argument("--m", type=int, help="edge count for gnm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpctri", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    c = sub.add_parser("count", help="run the triangle count and print a JSON report")
    _source_args(c)
    c.add_argument("--delta", type=_delta, default=0.5)
    v = sub.add_parser("verify", help="run and check against the sequential oracle")
    _source_args(v)
    v.add_argument("--delta", type=_delta, default=0.5)
    v.add_argument("--inject-fault", choices=("count", "drop-query"), help=argparse.SUPPRESS)
    s = sub.add_parser("scaling", help="sweep n and delta, print CSV")
    _source_args(s, sweep=True)
    s.add_argument("--delta", type=_delta, nargs="+", default=[0.5])
    return parser


def _generate(kind: str, n: int | None, k: int, m: int | None, seed: int) -> Graph:
    if n is None:
        raise UsageError("--gen needs --n")
    if kind == "forest-union":
        return gen_forest_union(n, k, seed)
    if m is None:
        raise UsageError("--gen gnm needs --m")
    return gen_gnm(n, m, seed)


def load_graph(args) -> Graph:
    if (args.input is None) == (args.gen is None):
        raise UsageError("give exactly one of --input or --gen")
    if args.gen:
        return _generate(args.gen, args.n, args.k, args.m, args.seed)
    try:
        if args.input == "-":
            return load_edge_list(sys.stdin)
        with open(args.input, encoding="utf-8") as fh:
            return load_edge_list(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None


def report(result) -> dict:
    d = result.metrics.to_dict()
    d["triangle_count"] = result.triangle_count
    return {k: d[k] for k in REPORT_KEYS}


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_count(args) -> int:
    g = load_graph(args)
    res = count_triangles(g, args.delta)
    _emit(json.dumps(report(res), sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _corrupt(result, fault: str):
    if fault == "count":
        return replace(result, triangle_count=result.triangle_count + 1)
    return replace(result, queries=result.queries[1:], queries_formed=result.queries_formed - 1)


def cmd_verify(args) -> int:
    g = load_graph(args)
    if g.n > ORACLE_LIMIT:
        raise UsageError(f"oracle limited to n <= {ORACLE_LIMIT}; got n = {g.n}")
    res = count_triangles(g, args.delta)
    if args.inject_fault:
        res = _corrupt(res, args.inject_fault)
    verdict = verify_run(g, res)
    _emit("\n".join(verdict.lines()) + "\n", args.out)
    if not verdict.passed:
        print(f"verification failed: {', '.join(verdict.failed())}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


SCALING_COLUMNS = ("n", "delta", "m", "S", "triangle_count", "rounds", "peak_machine_load",
                   "peak_total_records", "machines_used", "alpha_lower", "alpha_upper")


def cmd_scaling(args) -> int:
    kind = args.gen or "forest-union"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SCALING_COLUMNS, lineterminator="\n")
    w.writeheader()
    for n in args.n:
        g = _generate(kind, n, args.k, args.m, args.seed)
        for delta in args.delta:
            row = report(count_triangles(g, delta))
            w.writerow({k: row[k] for k in SCALING_COLUMNS})
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


COMMANDS = {"count": cmd_count, "verify": cmd_verify, "scaling": cmd_scaling}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ContractViolation, SimError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
