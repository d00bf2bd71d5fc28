"""Command line front end.

Every subcommand reads a network as JSON from --in (or stdin) and writes
to --out (or stdout).  Times and weights appear both exactly (fraction
strings) and as float approximations for quick inspection.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from .eio import STATS_FIELDS, eio
from .geometry import find_intersections
from .harness import BENCH_FIELDS, GenSpec, bench, gen_random, verify
from .model import (
    NetworkError,
    TemporalNetwork,
    fraction_str,
    parse_network,
    serialize_network,
    validate,
)
from .tso import TsmstResult, tso, tso_incremental_sort

__all__ = ["main"]


def _read_network(path: str | None) -> TemporalNetwork:
    if path is None or path == "-":
        return parse_network(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


def _cost_pieces(net: TemporalNetwork, interval) -> list[dict]:
    """The interval's tree cost as linear pieces between sample instants."""
    breaks = [interval.start]
    k = int(interval.start) + 1
    while k < interval.end:
        if Fraction(k) > interval.start:
            breaks.append(Fraction(k))
        k += 1
    breaks.append(interval.end)
    edges = [net.edges[e] for e in interval.tree.edge_ids()]

    def cost(t: Fraction) -> Fraction:
        return sum((e.weights.interpolate(t) for e in edges), Fraction(0))

    return [
        {
            "start": fraction_str(a),
            "end": fraction_str(b),
            "cost_start": fraction_str(cost(a)),
            "cost_end": fraction_str(cost(b)),
        }
        for a, b in zip(breaks, breaks[1:])
    ]


def _result_json(net: TemporalNetwork, result: TsmstResult) -> dict:
    return {
        "intervals": [
            {
                "start": fraction_str(item.start),
                "end": fraction_str(item.end),
                "start_approx": float(item.start),
                "end_approx": float(item.end),
                "edges": item.tree.edge_ids(),
                "cost": _cost_pieces(net, item),
            }
            for item in result.intervals
        ],
        "metadata": result.metadata,
    }


def _cmd_gen(args) -> int:
    spec = GenSpec(
        nodes=args.nodes,
        edges=args.edges,
        horizon=args.horizon,
        seed=args.seed,
        weight_range=(args.weight_lo, args.weight_hi),
        kind=args.kind,
        absence_count=args.absences,
    )
    net = gen_random(spec)
    out = _open_out(args.out)
    json.dump(serialize_network(net), out, indent=2)
    out.write("\n")
    return 0


def _cmd_events(args) -> int:
    net = _read_network(args.infile)
    events = find_intersections(net)
    out = _open_out(args.out)
    writer = csv.writer(out)
    writer.writerow(["time", "time_approx", "value", "value_approx", "edges"])
    for ev in events:
        writer.writerow(
            [
                fraction_str(ev.time),
                float(ev.time),
                fraction_str(ev.value),
                float(ev.value),
                " ".join(str(e) for e in sorted(ev.edge_ids)),
            ]
        )
    return 0


def _solve(net: TemporalNetwork, args) -> TsmstResult:
    if args.algo == "tso":
        if args.incremental_sort:
            return tso_incremental_sort(net)
        return tso(net)
    return eio(net, fast_path=not args.no_fast_path, collect_stats=args.stats)


def _cmd_solve(args) -> int:
    net = _read_network(args.infile)
    result = _solve(net, args)
    out = _open_out(args.out)
    json.dump(_result_json(net, result), out, indent=2)
    out.write("\n")
    return 0


def _cmd_verify(args) -> int:
    net = _read_network(args.infile)
    result = _solve(net, args)
    report = verify(net, result, samples_per_interval=args.samples)
    out = _open_out(args.out)
    if report.match:
        out.write(f"ok: {len(result.intervals)} intervals, "
                  f"{report.samples_checked} samples checked\n")
        return 0
    t, expected, got = report.first_divergence
    print(f"mismatch at t={fraction_str(t)}: expected {expected}, got {got}",
          file=sys.stderr)
    return 1


def _cmd_bench(args) -> int:
    specs = []
    for text in args.spec:
        try:
            n, m, k, seed = (int(x) for x in text.split(","))
        except ValueError:
            raise NetworkError(f"bad --spec {text!r}, expected n,m,K,seed")
        specs.append(GenSpec(n, m, k, seed))
    rows = bench(specs, args.algos.split(","))
    out = _open_out(args.out)
    writer = csv.DictWriter(out, fieldnames=BENCH_FIELDS)
    writer.writeheader()
    writer.writerows(rows)
    return 0


def _cmd_stats(args) -> int:
    net = _read_network(args.infile)
    result = eio(net, collect_stats=True)
    stats = result.metadata["stats"]
    out = _open_out(args.out)
    writer = csv.DictWriter(out, fieldnames=STATS_FIELDS)
    writer.writeheader()
    writer.writerow({name: stats[name] for name in STATS_FIELDS})
    return 0


def _cmd_validate(args) -> int:
    net = _read_network(args.infile)
    report = validate(net)
    out = _open_out(args.out)
    out.write(report.summary() + "\n")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsmst",
        description="Minimum spanning trees over time-varying edge weights.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, infile=True):
        if infile:
            p.add_argument("--in", dest="infile", default=None,
                           help="network JSON file (default: stdin)")
        p.add_argument("--out", default=None, help="output file (default: stdout)")

    p = sub.add_parser("gen", help="generate a random network")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight-lo", type=int, default=1)
    p.add_argument("--weight-hi", type=int, default=10_000)
    p.add_argument("--kind", choices=["random-series", "trajectory"],
                   default="random-series")
    p.add_argument("--absences", type=int, default=0,
                   help="number of edges given one absence window")
    add_io(p, infile=False)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("events", help="list intersection events as CSV")
    add_io(p)
    p.set_defaults(func=_cmd_events)

    def add_solver_args(p):
        p.add_argument("--algo", choices=["tso", "eio"], default="eio")
        p.add_argument("--incremental-sort", action="store_true",
                       help="tso only: re-place event edges in one sorted order")
        p.add_argument("--no-fast-path", action="store_true",
                       help="eio only: disable the recorded-cycle swap shortcut")
        p.add_argument("--stats", action="store_true",
                       help="eio only: include filter counters in the metadata")

    p = sub.add_parser("solve", help="compute the tree-per-sub-interval partition")
    add_solver_args(p)
    add_io(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="solve, then cross-check the result")
    add_solver_args(p)
    p.add_argument("--samples", type=int, default=5,
                   help="oracle samples per interval (small networks only)")
    add_io(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="time the solvers on generated networks")
    p.add_argument("--spec", action="append", required=True,
                   metavar="N,M,K,SEED", help="repeatable network size spec")
    p.add_argument("--algos", default="tso,eio")
    add_io(p, infile=False)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("stats", help="filter counters of one incremental run")
    add_io(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("validate", help="report connectivity and degeneracy issues")
    add_io(p)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NetworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
