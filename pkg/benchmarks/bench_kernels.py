#!/usr/bin/env python3
"""Compiled vs interpreted kernels.

Each mode runs in its own interpreter because the switch is read at import
time.  The child times coarsening, one FM refinement, one label propagation
refinement and a whole ``strong`` run on the same generated netlist, takes
the best of a few repetitions, and prints JSON; the parent prints a table.

    python benchmarks/bench_kernels.py --n 1500 --repeat 2
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from hyperpart import Coarsener, Partition, partition
from hyperpart._jit import USE_NUMBA
from hyperpart.fm import FMRefiner
from hyperpart.generators import netlist
from hyperpart.sclap import SCLaPRefiner

n, k, repeat = int(sys.argv[1]), int(sys.argv[2]), int(sys.argv[3])
hg = netlist(n, seed=1)
start = np.random.default_rng(0).integers(0, k, n)
start[:k] = np.arange(k)


def coarsen():
    w = hg.copy()
    Coarsener(w, 2.5 * w.total_weight / (160 * k), 160 * k, "lazy", seed=0).run()


def fm():
    p = Partition.initialize(hg, start, k, 0.03)
    FMRefiner(p, seed=0).refine(np.arange(n))


def sclap():
    p = Partition.initialize(hg, start, k, 0.03)
    SCLaPRefiner(p, seed=0).refine(np.arange(n))


def strong():
    partition(hg, k, 0.03, "strong", seed=0)


def best(fn):
    fn()  # compilation or warm caches
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


out = {"numba": USE_NUMBA}
for name, fn in (("coarsen", coarsen), ("fm", fm), ("sclap", sclap), ("strong", strong)):
    out[name] = best(fn)
print(json.dumps(out))
"""


def run(mode, n, k, repeat):
    env = dict(os.environ)
    env.pop("HYPERPART_DISABLE_NUMBA", None)
    if mode == "interpreted":
        env["HYPERPART_DISABLE_NUMBA"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", CHILD, str(n), str(k), str(repeat)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1500)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=2)
    ap.add_argument("--json", help="also write the raw numbers here")
    args = ap.parse_args()

    res = {mode: run(mode, args.n, args.k, args.repeat) for mode in ("numba", "interpreted")}
    assert res["numba"]["numba"] and not res["interpreted"]["numba"]

    print(f"n={args.n} k={args.k}, best of {args.repeat}")
    print(f"{'phase':<10} {'numba':>10} {'python':>10} {'speedup':>9}")
    for phase in ("coarsen", "fm", "sclap", "strong"):
        a, b = res["numba"][phase], res["interpreted"][phase]
        print(f"{phase:<10} {a * 1000:>8.1f}ms {b * 1000:>8.1f}ms {b / a:>8.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"n": args.n, "k": args.k, "repeat": args.repeat, **res}, fh, indent=2)


if __name__ == "__main__":
    main()
