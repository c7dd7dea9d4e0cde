"""Multilevel driver: coarsen, partition the coarsest hypergraph, uncoarsen.

Uncoarsening undoes one contraction at a time.  The restored vertex joins
its representative's block, which leaves the cut unchanged, and a local
search seeded with the pair runs whenever one of the two is a border vertex.
V-cycles re-coarsen with contractions restricted to pairs inside one block,
keep the partition, and uncoarsen again.
"""

from dataclasses import dataclass, field
import time

import numpy as np

from . import fm as fm_mod
from . import sclap as sclap_mod
from ._jit import _stream_id, kernel
from .coarsening import Coarsener
from .hypergraph import NUM_MEM, uncontract_kernel
from .initial import InitialConfig, InitialPartitionError, initial_partition
from .partition import Partition, is_border, rebuild, recompute_net


@dataclass(frozen=True)
class Preset:
    name: str
    refiner: str
    vcycles: int
    variant: str = "lazy"
    c_stop: int = 200
    rounds: int = 5
    s: float = 2.5
    t_factor: int = 160
    initial_trials: int = 1


PRESETS = {
    "fast": Preset("fast", "sclap", 0),
    "strong": Preset("strong", "fm", 0),
    "fastv": Preset("fastv", "sclap", 3),
    "strongv": Preset("strongv", "fm", 10),
}


def get_preset(preset, **overrides):
    p = PRESETS[preset] if isinstance(preset, str) else preset
    if overrides:
        fields = {k: getattr(p, k) for k in p.__dataclass_fields__}
        fields.update({k: v for k, v in overrides.items() if v is not None})
        p = Preset(**fields)
    return p


@dataclass
class RunResult:
    partition: Partition
    cut: float
    imbalance: float
    balanced: bool
    timings: dict
    seed: int
    vcycle_trace: list = field(default_factory=list)
    initial_balanced: bool = True
    stats: dict = field(default_factory=dict)

    @property
    def assignment(self):
        return self.partition.assignment


# ---------------------------------------------------------------------------
# kernels


@kernel
def uncontract_partitioned(h, p):
    """Undo the newest contraction and patch the partition tables."""
    j = h.counts[NUM_MEM] - 1
    u = h.mem_u[j]
    v = h.mem_v[j]
    b = p.part[u]
    p.part[v] = b
    p.bc[b] += 1
    rs = h.mem_rem_start[j]
    re = h.mem_rem_end[j]
    uncontract_kernel(h)
    for r in range(rs, re):
        recompute_net(h, p, h.rem_net[r])
    # nets that held both u and v got v back as an extra pin in block b
    ib = h.inc_begin[v]
    for t in range(h.inc_size[v]):
        e = h.inc[ib + t]
        o = p.slot_off[e]
        total = 0
        for q in range(p.lam[e]):
            total += p.slot_cnt[o + q]
        if total == h.nsize[e] - 1:
            for q in range(p.lam[e]):
                if p.slot_block[o + q] == b:
                    p.slot_cnt[o + q] += 1
    return u, v


@kernel
def uncoarsen_fm(h, p, fs, stop_level, max_passes):
    while h.counts[NUM_MEM] > stop_level:
        u, v = uncontract_partitioned(h, p)
        fm_mod.refine_pair(h, p, fs, u, v, max_passes)


@kernel
def uncoarsen_lp(h, p, ss, stop_level):
    while h.counts[NUM_MEM] > stop_level:
        u, v = uncontract_partitioned(h, p)
        if is_border(h, p, u) or is_border(h, p, v):
            sclap_mod.refine_pair(h, p, ss, u, v)


# ---------------------------------------------------------------------------
# python side


def _stream_seed(seed, name):
    """Independent 32-bit seed for the named stream of a master seed."""
    return int(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, _stream_id(name)]).generate_state(1)[0])


class _Refiner:
    def __init__(self, partition, preset, seed):
        self.kind = preset.refiner
        if self.kind == "fm":
            self.state = fm_mod.allocate(partition.hg, partition.k, seed, "refine-fm", preset.c_stop)
        elif self.kind == "sclap":
            self.state = sclap_mod.allocate(partition.hg, partition.k, seed, "refine-sclap", preset.rounds)
        else:
            raise ValueError(f"unknown refiner {self.kind!r}")

    def uncoarsen(self, partition, stop_level=0):
        h = partition.hg.a
        if self.kind == "fm":
            uncoarsen_fm(h, partition.p, self.state, stop_level, 1 << 30)
        else:
            uncoarsen_lp(h, partition.p, self.state, stop_level)

    def stats(self):
        if self.kind == "fm":
            c = self.state.counts
            return {"moves": int(c[fm_mod.C_TOTAL_MOVES]), "kept": int(c[fm_mod.C_TOTAL_KEPT]), "passes": int(c[fm_mod.C_PASSES])}
        c = self.state.counts
        return {"moves": int(c[3]), "rounds": int(c[4])}


def _coarsen(hg, k, preset, seed, part=None):
    target = preset.t_factor * k
    c_max = preset.s * hg.total_weight / target
    c = Coarsener(hg, c_max, target, preset.variant, seed=seed, part=part)
    return c.run()


def _check_args(hg, k, epsilon):
    if k < 2:
        raise ValueError("k must be at least 2")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if k > hg.current_num_vertices:
        raise InitialPartitionError(f"cannot split {hg.current_num_vertices} vertices into {k} nonempty blocks")


def vcycle(partition, preset, seed, refiner=None, index=0):
    """One V-cycle on a partition at level 0; returns the new cut."""
    preset = get_preset(preset)
    hg = partition.hg
    refiner = refiner or _Refiner(partition, preset, _stream_seed(seed, "refine"))
    _coarsen(hg, partition.k, preset, _stream_seed(seed, f"vcycle-{index}"), part=partition.p.part)
    rebuild(hg.a, partition.p)
    refiner.uncoarsen(partition)
    return partition.cut


def partition(hg, k, epsilon=0.03, preset="strong", seed=0, initial=None, **overrides):
    """Partition ``hg`` into ``k`` blocks; the input hypergraph is left untouched."""
    preset = get_preset(preset, **overrides)
    _check_args(hg, k, epsilon)
    timings = {}
    t_start = time.perf_counter()
    work = hg.copy()

    t = time.perf_counter()
    levels = _coarsen(work, k, preset, _stream_seed(seed, "coarsen"))
    timings["coarsen"] = time.perf_counter() - t

    t = time.perf_counter()
    cfg = initial or InitialConfig(trials=preset.initial_trials)
    init = initial_partition(work, k, epsilon, cfg, seed=_stream_seed(seed, "initial"))
    part = Partition.initialize(work, init.assignment, k, epsilon)
    timings["initial"] = time.perf_counter() - t

    t = time.perf_counter()
    refiner = _Refiner(part, preset, _stream_seed(seed, "refine"))
    refiner.uncoarsen(part)
    timings["uncoarsen"] = time.perf_counter() - t

    t = time.perf_counter()
    trace = [part.cut]
    for i in range(preset.vcycles):
        before = part.cut
        after = vcycle(part, preset, seed, refiner, index=i)
        trace.append(after)
        if after >= before:
            break
    timings["vcycles"] = time.perf_counter() - t
    timings["total"] = time.perf_counter() - t_start

    stats = refiner.stats()
    stats["levels"] = levels
    return RunResult(
        partition=part,
        cut=part.cut,
        imbalance=part.imbalance(),
        balanced=part.is_balanced(),
        timings=timings,
        seed=seed,
        vcycle_trace=trace,
        initial_balanced=init.balanced,
        stats=stats,
    )
