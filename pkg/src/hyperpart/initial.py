"""Initial partitioning of the coarsest hypergraph.

The builtin partitioner is recursive bisection.  Each bisection grows one
side greedily from a random vertex, always adding the vertex with the largest
connection weight to the side, and then improves the cut with 2-way FM.  The
per-bisection imbalance follows

    eps' = 100 * (((1 + eps) / k + max c(v) / c(V)) ** (1 / ceil(log2 k)) - 0.5)

so that the imbalances compound to the requested one after all levels.

An external partitioner can be plugged in through a command template.
"""

from dataclasses import dataclass
import heapq
import math
import os
import shlex
import subprocess
import tempfile

import numpy as np

from .fm import FMRefiner
from .hypergraph import Hypergraph
from .io import FormatError, read_partition, write_hmetis
from .partition import Partition, cut_from_scratch, max_block_weight


class InitialPartitionError(RuntimeError):
    pass


@dataclass
class InitialConfig:
    trials: int = 1
    bisection_starts: int = 4
    mode: str = "builtin"
    command: str | None = None

    def __post_init__(self):
        if self.trials < 1 or self.bisection_starts < 1:
            raise ValueError("trials and bisection_starts must be at least 1")
        if self.mode not in ("builtin", "external"):
            raise ValueError(f"unknown initial partitioning mode {self.mode!r}")
        if self.mode == "external" and not self.command:
            raise ValueError("external mode needs a command template")


@dataclass
class InitialResult:
    assignment: np.ndarray
    cut: float
    balanced: bool


def epsilon_prime(epsilon, k, max_vertex_weight, total_weight):
    """Per-bisection imbalance in percent."""
    if k < 2:
        raise ValueError("k must be at least 2")
    depth = math.ceil(math.log2(k))
    base = (1.0 + epsilon) / k + max_vertex_weight / total_weight
    return 100.0 * (base ** (1.0 / depth) - 0.5)


def _sub_hypergraph(hg, verts):
    """Hypergraph induced by ``verts`` keeping nets with two or more pins inside."""
    remap = np.full(hg.num_vertices, -1, dtype=np.int64)
    remap[verts] = np.arange(verts.size)
    nets, weights = [], []
    for e in hg.enabled_nets():
        pins = remap[hg.pins(e)]
        pins = pins[pins >= 0]
        if pins.size >= 2:
            nets.append(pins)
            weights.append(hg.a.nweight[e])
    return Hypergraph.build(verts.size, nets, np.asarray(weights, dtype=np.float64), hg.a.vweight[verts])


def _grow(hg, target, cap, need0, need1, rng):
    """Greedy hyperedge growing of side 0; returns a 0/1 assignment."""
    n = hg.num_vertices
    w = hg.a.vweight
    side = np.ones(n, dtype=np.int64)
    conn = np.zeros(n)
    order = rng.permutation(n)
    nxt = 0
    heap = []
    w0 = 0.0
    c0 = 0
    net_in = np.zeros(hg.num_nets, dtype=bool)
    while n - c0 > need1 and not (c0 >= need0 and w0 >= target):
        v = -1
        while heap:
            negc, _, x = heapq.heappop(heap)
            if side[x] == 1 and -negc == conn[x]:
                v = x
                break
        if v < 0:
            while nxt < n and side[order[nxt]] != 1:
                nxt += 1
            if nxt == n:
                break
            v = int(order[nxt])
        if c0 >= need0 and w0 + w[v] > cap:
            # does not fit; keep it out for good
            conn[v] = -math.inf
            side[v] = 2
            continue
        side[v] = 0
        w0 += w[v]
        c0 += 1
        for e in hg.incident_nets(v):
            if net_in[e]:
                continue
            net_in[e] = True
            for x in hg.pins(e):
                if side[x] == 1:
                    conn[x] += hg.a.nweight[e]
                    heapq.heappush(heap, (-conn[x], rng.random(), int(x)))
    side[side == 2] = 1
    return side


def _bisect(hg, k0, k1, eps_prime, lmax, starts, rng, c_stop):
    """Best of ``starts`` grown-and-refined bisections of ``hg``."""
    kk = k0 + k1
    total = hg.total_weight
    frac = 1.0 + 2.0 * eps_prime / 100.0
    caps = np.array([min(k0 / kk * total * frac, k0 * lmax), min(k1 / kk * total * frac, k1 * lmax)])
    best = None
    for _ in range(starts):
        side = _grow(hg, k0 / kk * total, caps[0], k0, k1, rng)
        part = Partition.initialize(hg, side, 2, max_weights=caps)
        part.p.min_count[:] = [k0, k1]
        fm = FMRefiner(part, seed=int(rng.integers(1 << 62)), c_stop=c_stop, stream="initial-fm")
        border = [v for v in range(hg.num_vertices) if part.is_border(v)]
        if border:
            fm.refine(border)
        over = max(0.0, float((part.p.bw - caps).max()))
        key = (over, part.cut)
        if best is None or key < best[0]:
            best = (key, part.assignment)
    return best[1]


def _recurse(hg, verts, k, first_block, out, eps_prime, lmax, starts, rng):
    if k == 1:
        out[verts] = first_block
        return
    k0 = (k + 1) // 2
    k1 = k // 2
    sub = _sub_hypergraph(hg, verts)
    side = _bisect(sub, k0, k1, eps_prime, lmax, starts, rng, c_stop=max(200, sub.num_vertices))
    _recurse(hg, verts[side == 0], k0, first_block, out, eps_prime, lmax, starts, rng)
    _recurse(hg, verts[side == 1], k1, first_block + k0, out, eps_prime, lmax, starts, rng)


def recursive_bisection(hg, k, epsilon, rng, starts=4):
    """One builtin k-way partition of the enabled part of ``hg``; returns a full-size assignment."""
    sub, ids = hg.compact()
    eps_prime = epsilon_prime(epsilon, k, float(sub.a.vweight.max()), sub.total_weight) if k > 1 else 0.0
    lmax = max_block_weight(sub.total_weight, k, epsilon)
    if np.all(sub.a.vweight == np.round(sub.a.vweight)):
        # integral weights: a side of j blocks can hold at most j * floor(lmax)
        lmax = math.floor(lmax + 1e-9)
    local = np.full(sub.num_vertices, -1, dtype=np.int64)
    _recurse(sub, np.arange(sub.num_vertices), k, 0, local, eps_prime, lmax, starts, rng)
    out = np.full(hg.num_vertices, -1, dtype=np.int64)
    out[ids] = local
    return out


def initial_partition(hg, k, epsilon=0.03, config=None, seed=0):
    """Partition the enabled vertices of ``hg`` into ``k`` blocks.

    Runs ``config.trials`` independent repetitions and keeps the balanced one
    with the lowest cut (earliest on ties).  If none is balanced, the least
    overloaded one is returned with ``balanced=False``.
    """
    config = config or InitialConfig()
    n = hg.current_num_vertices
    if k < 1 or k > n:
        raise InitialPartitionError(f"cannot split {n} vertices into {k} nonempty blocks")
    lmax = max_block_weight(hg.total_weight, k, epsilon)
    best = None
    for trial in range(config.trials):
        ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0x1417, trial])
        rng = np.random.default_rng(ss)
        if config.mode == "external":
            eps_p = epsilon_prime(epsilon, k, float(hg.a.vweight[hg.a.venabled].max()), hg.total_weight)
            assignment = external_partition(hg, k, eps_p, config.command, int(rng.integers(1 << 31)))
        else:
            assignment = recursive_bisection(hg, k, epsilon, rng, config.bisection_starts)
        enabled = hg.a.venabled
        bw = np.bincount(assignment[enabled], weights=hg.a.vweight[enabled], minlength=k)
        over = max(0.0, float((bw - lmax).max()))
        cut = cut_from_scratch(hg, assignment)
        key = (over, cut)
        if best is None or key < best[0]:
            best = (key, assignment)
    (over, cut), assignment = best
    return InitialResult(assignment=assignment, cut=cut, balanced=over == 0.0)


def external_partition(hg, k, eps_prime, command, seed=0, timeout=None):
    """Run an external partitioner on ``hg`` and read back its partition.

    ``command`` is a template with the placeholders ``{input}``, ``{k}``,
    ``{eps}``, ``{seed}`` and optionally ``{output}``.  Without ``{output}``
    the partition is expected in ``<input>.part.<k>``, the hMetis convention.
    """
    sub, ids = hg.compact()
    with tempfile.TemporaryDirectory(prefix="hyperpart-") as tmp:
        inp = os.path.join(tmp, "coarse.hgr")
        out = os.path.join(tmp, "coarse.hgr.part.%d" % k)
        write_hmetis(sub, inp)
        cmd = command.format(input=inp, k=k, eps=eps_prime, seed=seed, output=out)
        proc = subprocess.run(shlex.split(cmd), capture_output=True, text=True, timeout=timeout)
        if proc.returncode != 0:
            raise InitialPartitionError(
                f"external partitioner exited with {proc.returncode}\n"
                f"stdout:\n{proc.stdout}\nstderr:\n{proc.stderr}"
            )
        try:
            local = read_partition(out, sub.num_vertices, k)
        except FormatError as exc:
            raise InitialPartitionError(str(exc)) from None
    full = np.full(hg.num_vertices, -1, dtype=np.int64)
    full[ids] = local
    return full
