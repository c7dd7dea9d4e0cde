"""Benchmark harness.

Every (instance, k, preset, seed) combination is run once.  Each run becomes
one JSON record (one per line in the stats file)::

    {"instance": "ibm01", "n": 12752, "m": 14111, "k": 2, "epsilon": 0.03,
     "preset": "strong", "seed": 3, "cut": 212.0, "imbalance": 0.0297,
     "balanced": true, "initial_balanced": true,
     "timings": {"coarsen": ..., "initial": ..., "uncoarsen": ...,
                 "vcycles": ..., "total": ...}}

Instances that fail to load produce ``{"instance": ..., "error": ...}``.

Aggregation: per (instance, k, preset) the cut is averaged arithmetically
over the balanced runs, and across instances the per-instance averages are
combined by geometric mean so that every instance has a comparable
influence.  Imbalanced runs are kept in the records but excluded from all
quality numbers.
"""

from dataclasses import dataclass, field
import json
import math
import os

import numpy as np

from .driver import partition
from .io import FormatError, read_hypergraph


def geometric_mean(values):
    vals = np.asarray(list(values), dtype=np.float64)
    if vals.size == 0:
        return math.nan
    if (vals < 0).any():
        raise ValueError("geometric mean of negative values")
    if (vals == 0).any():
        return 0.0
    return float(np.exp(np.log(vals).mean()))


def _load(item, fmt):
    if isinstance(item, (str, os.PathLike)):
        name = os.path.basename(os.fspath(item))
        return name, read_hypergraph(item, fmt)
    name, hg = item
    return name, hg


def run_bench(instances, ks, presets, seeds, epsilon=0.03, fmt="hmetis", stats=None, progress=None, **overrides):
    """Run the full grid and return a :class:`BenchReport`.

    ``instances`` holds file paths or ``(name, hypergraph)`` pairs.  When
    ``stats`` is an open text file every record is written to it as soon as
    the run finishes.
    """
    records = []

    def emit(rec):
        records.append(rec)
        if stats is not None:
            stats.write(json.dumps(rec) + "\n")
            stats.flush()
        if progress is not None:
            progress(rec)

    for item in instances:
        try:
            name, hg = _load(item, fmt)
        except (OSError, FormatError) as exc:
            emit({"instance": os.fspath(item) if not isinstance(item, tuple) else item[0], "error": str(exc)})
            continue
        for k in ks:
            for preset in presets:
                for seed in seeds:
                    res = partition(hg, k, epsilon, preset, seed=seed, **overrides)
                    emit(
                        {
                            "instance": name,
                            "n": int(hg.current_num_vertices),
                            "m": int(len(hg.enabled_nets())),
                            "k": int(k),
                            "epsilon": float(epsilon),
                            "preset": preset if isinstance(preset, str) else preset.name,
                            "seed": int(seed),
                            "cut": float(res.cut),
                            "imbalance": float(res.imbalance),
                            "balanced": bool(res.balanced),
                            "initial_balanced": bool(res.initial_balanced),
                            "timings": {key: float(v) for key, v in res.timings.items()},
                        }
                    )
    return BenchReport.from_records(records)


@dataclass
class Row:
    instance: str
    k: int
    preset: str
    runs: int
    invalid: int
    avg_cut: float
    best_cut: float
    avg_time: float


@dataclass
class Summary:
    k: int
    preset: str
    instances: int
    invalid_runs: int
    gmean_avg_cut: float
    gmean_best_cut: float
    gmean_time: float


@dataclass
class BenchReport:
    records: list
    rows: list = field(default_factory=list)
    summary: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @classmethod
    def from_records(cls, records):
        errors = [r for r in records if "error" in r]
        groups = {}
        for r in records:
            if "error" in r:
                continue
            groups.setdefault((r["instance"], r["k"], r["preset"]), []).append(r)
        rows = []
        for (inst, k, preset), runs in groups.items():
            valid = [r for r in runs if r["balanced"]]
            cuts = [r["cut"] for r in valid]
            rows.append(
                Row(
                    instance=inst,
                    k=k,
                    preset=preset,
                    runs=len(runs),
                    invalid=len(runs) - len(valid),
                    avg_cut=float(np.mean(cuts)) if cuts else math.nan,
                    best_cut=float(min(cuts)) if cuts else math.nan,
                    avg_time=float(np.mean([r["timings"]["total"] for r in runs])),
                )
            )
        summary = []
        keys = sorted({(row.k, row.preset) for row in rows}, key=lambda x: (x[0], str(x[1])))
        for k, preset in keys:
            mine = [row for row in rows if row.k == k and row.preset == preset]
            ok = [row for row in mine if not math.isnan(row.avg_cut)]
            summary.append(
                Summary(
                    k=k,
                    preset=preset,
                    instances=len(ok),
                    invalid_runs=sum(row.invalid for row in mine),
                    gmean_avg_cut=geometric_mean(row.avg_cut for row in ok),
                    gmean_best_cut=geometric_mean(row.best_cut for row in ok),
                    gmean_time=geometric_mean(row.avg_time for row in mine),
                )
            )
        return cls(records=list(records), rows=rows, summary=summary, errors=errors)

    def lookup(self, k, preset):
        for s in self.summary:
            if s.k == k and s.preset == preset:
                return s
        raise KeyError((k, preset))

    def table(self):
        lines = []
        head = f"{'instance':<28} {'k':>3} {'preset':<8} {'avg cut':>10} {'best cut':>10} {'avg time':>9} {'invalid':>7}"
        lines.append(head)
        lines.append("-" * len(head))
        for row in sorted(self.rows, key=lambda r: (r.instance, r.k, str(r.preset))):
            lines.append(
                f"{row.instance:<28} {row.k:>3} {row.preset:<8} {row.avg_cut:>10.2f} {row.best_cut:>10.2f} "
                f"{row.avg_time:>8.3f}s {row.invalid:>7}"
            )
        lines.append("")
        head = f"{'geometric mean':<28} {'k':>3} {'preset':<8} {'avg cut':>10} {'best cut':>10} {'avg time':>9} {'invalid':>7}"
        lines.append(head)
        lines.append("-" * len(head))
        for s in self.summary:
            lines.append(
                f"{f'{s.instances} instances':<28} {s.k:>3} {s.preset:<8} {s.gmean_avg_cut:>10.2f} "
                f"{s.gmean_best_cut:>10.2f} {s.gmean_time:>8.3f}s {s.invalid_runs:>7}"
            )
        for e in self.errors:
            lines.append(f"skipped {e['instance']}: {e['error']}")
        return "\n".join(lines)


def read_records(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
