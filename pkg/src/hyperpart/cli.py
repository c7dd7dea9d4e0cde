"""Command line interface.

    hyperpart partition INPUT K [options]
    hyperpart bench INPUT [INPUT ...] --k 2 4 --presets fast strong --seeds 10
    hyperpart generate OUTDIR [--count 20 --n 5000 --seed 0]

Exit status is 0 on success, 1 on input or validation errors and 2 on
usage errors.
"""

import argparse
import json
import os
import sys

from . import __version__
from .bench import run_bench
from .driver import PRESETS, partition
from .generators import benchmark_suite
from .hypergraph import HypergraphError
from .initial import InitialConfig, InitialPartitionError
from .io import FormatError, read_hypergraph, write_hmetis, write_partition
from .coarsening import POLICIES


def _add_common(p):
    p.add_argument("--format", choices=("hmetis", "matrix"), default="hmetis", help="input format (default hmetis)")
    p.add_argument("--epsilon", "-e", type=float, default=0.03, help="allowed imbalance (default 0.03)")
    p.add_argument("--variant", choices=sorted(POLICIES), help="override the coarsening variant")
    p.add_argument(
        "--initial-command",
        help="external initial partitioner; placeholders {input} {k} {eps} {seed} {output}",
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="hyperpart", description="n-level hypergraph partitioning")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="partition one hypergraph")
    p.add_argument("input")
    p.add_argument("k", type=int)
    _add_common(p)
    p.add_argument("--preset", "-p", choices=sorted(PRESETS), default="strong")
    p.add_argument("--seed", "-s", type=int, default=0)
    p.add_argument("--repetitions", "-r", type=int, default=1, help="runs with seeds seed, seed+1, ...; best is kept")
    p.add_argument("--output", "-o", help="partition file (default INPUT.part.K)")
    p.add_argument("--stats", help="append one JSON record per run to this file")

    b = sub.add_parser("bench", help="run a benchmark grid")
    b.add_argument("inputs", nargs="+")
    _add_common(b)
    b.add_argument("--k", type=int, nargs="+", default=[2])
    b.add_argument("--presets", nargs="+", choices=sorted(PRESETS), default=["fast", "strong"])
    b.add_argument("--seeds", type=int, default=10, help="number of seeds, 1..N (default 10)")
    b.add_argument("--stats", help="write one JSON record per run to this file")

    g = sub.add_parser("generate", help="write the generated benchmark instances as hMetis files")
    g.add_argument("outdir")
    g.add_argument("--count", type=int, default=20)
    g.add_argument("--n", type=int, default=5000)
    g.add_argument("--seed", type=int, default=0)
    return parser


def _overrides(args):
    out = {}
    if args.variant:
        out["variant"] = args.variant
    if args.initial_command:
        out["initial"] = InitialConfig(mode="external", command=args.initial_command)
    return out


def _record(path, k, args, seed, res):
    return {
        "instance": os.path.basename(path),
        "k": k,
        "epsilon": args.epsilon,
        "preset": args.preset,
        "seed": seed,
        "cut": res.cut,
        "imbalance": res.imbalance,
        "balanced": res.balanced,
        "initial_balanced": res.initial_balanced,
        "vcycle_trace": res.vcycle_trace,
        "timings": res.timings,
    }


def cmd_partition(args):
    if args.repetitions < 1:
        raise ValueError("--repetitions must be at least 1")
    hg = read_hypergraph(args.input, args.format)
    extra = _overrides(args)
    best = None
    stats = open(args.stats, "a") if args.stats else None
    try:
        for r in range(args.repetitions):
            seed = args.seed + r
            res = partition(hg, args.k, args.epsilon, args.preset, seed=seed, **extra)
            if stats:
                stats.write(json.dumps(_record(args.input, args.k, args, seed, res)) + "\n")
            key = (not res.balanced, res.cut)
            if best is None or key < best[0]:
                best = (key, res)
    finally:
        if stats:
            stats.close()
    res = best[1]
    out = args.output or f"{args.input}.part.{args.k}"
    write_partition(res.assignment, out)
    status = "balanced" if res.balanced else "IMBALANCED"
    print(f"cut {res.cut:g}  imbalance {res.imbalance:.4f} ({status})  seed {res.seed}  time {res.timings['total']:.3f}s")
    print(f"partition written to {out}")
    return 0 if res.balanced or not res.initial_balanced else 1


def cmd_bench(args):
    if args.seeds < 1:
        raise ValueError("--seeds must be at least 1")
    stats = open(args.stats, "w") if args.stats else None
    try:
        report = run_bench(
            args.inputs,
            args.k,
            args.presets,
            range(1, args.seeds + 1),
            epsilon=args.epsilon,
            fmt=args.format,
            stats=stats,
            **_overrides(args),
        )
    finally:
        if stats:
            stats.close()
    print(report.table())
    return 1 if report.errors else 0


def cmd_generate(args):
    os.makedirs(args.outdir, exist_ok=True)
    for name, hg in benchmark_suite(args.count, args.n, args.seed):
        path = os.path.join(args.outdir, name + ".hgr")
        write_hmetis(hg, path)
        print(path)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"partition": cmd_partition, "bench": cmd_bench, "generate": cmd_generate}[args.command]
    try:
        return handler(args)
    except (OSError, FormatError, HypergraphError, InitialPartitionError, ValueError) as exc:
        print(f"hyperpart: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
