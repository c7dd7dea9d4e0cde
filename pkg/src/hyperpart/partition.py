"""k-way partition with incrementally maintained pin counts.

For every net the blocks it touches are kept as a compact slot list
(``slot_block``/``slot_cnt``), ``lam[e]`` of them live.  A net never touches
more than ``min(|e|, k)`` blocks, so the slot area is bounded by the pin
count.  Looking up a pin count scans the live slots, which is cheap because
most nets touch one or two blocks.
"""

from collections import namedtuple
from dataclasses import dataclass
import math

import numpy as np

from ._jit import kernel

PArrays = namedtuple(
    "PArrays",
    ["part", "bw", "bc", "lmax", "min_count", "slot_off", "slot_block", "slot_cnt", "lam", "cut"],
)


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class MoveDelta:
    vertex: int
    from_block: int
    to_block: int
    cut_delta: float


@kernel
def phi(p, e, i):
    o = p.slot_off[e]
    for s in range(p.lam[e]):
        if p.slot_block[o + s] == i:
            return p.slot_cnt[o + s]
    return 0


@kernel
def _add_pin(p, e, i):
    o = p.slot_off[e]
    n = p.lam[e]
    for s in range(n):
        if p.slot_block[o + s] == i:
            p.slot_cnt[o + s] += 1
            return
    p.slot_block[o + n] = i
    p.slot_cnt[o + n] = 1
    p.lam[e] = n + 1


@kernel
def _remove_pin(p, e, i):
    o = p.slot_off[e]
    n = p.lam[e]
    for s in range(n):
        if p.slot_block[o + s] == i:
            c = p.slot_cnt[o + s] - 1
            if c == 0:
                p.slot_block[o + s] = p.slot_block[o + n - 1]
                p.slot_cnt[o + s] = p.slot_cnt[o + n - 1]
                p.lam[e] = n - 1
            else:
                p.slot_cnt[o + s] = c
            return


@kernel
def recompute_net(h, p, e):
    p.lam[e] = 0
    b = h.pin_begin[e]
    for t in range(h.nsize[e]):
        _add_pin(p, e, p.part[h.pins[b + t]])


@kernel
def rebuild(h, p):
    """Recompute every table from ``part`` over the enabled hypergraph."""
    k = p.bw.shape[0]
    for i in range(k):
        p.bw[i] = 0.0
        p.bc[i] = 0
    for v in range(h.vweight.shape[0]):
        if h.venabled[v]:
            b = p.part[v]
            p.bw[b] += h.vweight[v]
            p.bc[b] += 1
    cut = 0.0
    for e in range(h.nweight.shape[0]):
        if h.nenabled[e]:
            recompute_net(h, p, e)
            if p.lam[e] > 1:
                cut += h.nweight[e]
    p.cut[0] = cut


@kernel
def move_vertex(h, p, v, to):
    frm = p.part[v]
    delta = 0.0
    ib = h.inc_begin[v]
    for t in range(h.inc_size[v]):
        e = h.inc[ib + t]
        before = p.lam[e]
        _remove_pin(p, e, frm)
        _add_pin(p, e, to)
        after = p.lam[e]
        if before == 1 and after > 1:
            delta += h.nweight[e]
        elif before > 1 and after == 1:
            delta -= h.nweight[e]
    p.part[v] = to
    w = h.vweight[v]
    p.bw[frm] -= w
    p.bw[to] += w
    p.bc[frm] -= 1
    p.bc[to] += 1
    p.cut[0] += delta
    return delta


@kernel
def is_border(h, p, v):
    ib = h.inc_begin[v]
    for t in range(h.inc_size[v]):
        if p.lam[h.inc[ib + t]] > 1:
            return True
    return False


@kernel
def is_balanced_kernel(p):
    for i in range(p.bw.shape[0]):
        if p.bw[i] > p.lmax[i]:
            return False
    return True


@kernel
def max_load(p):
    """Largest block weight relative to its limit."""
    worst = 0.0
    for i in range(p.bw.shape[0]):
        r = p.bw[i] / p.lmax[i] if p.lmax[i] > 0 else math.inf
        if r > worst:
            worst = r
    return worst


def max_block_weight(total_weight, k, epsilon):
    return (1.0 + epsilon) * math.ceil(total_weight / k)


def allocate(hg, k):
    a = hg.a
    # pin segments never grow, so the original net sizes bound every slot list
    orig = np.diff(np.append(a.pin_begin, a.pins.size)).astype(np.int64)
    caps = np.minimum(orig, k)
    off = np.zeros(caps.size, dtype=np.int64)
    if caps.size:
        off[1:] = np.cumsum(caps)[:-1]
    total = max(int(caps.sum()), 1)
    return PArrays(
        part=np.full(hg.num_vertices, -1, dtype=np.int64),
        bw=np.zeros(k),
        bc=np.zeros(k, dtype=np.int64),
        lmax=np.zeros(k),
        min_count=np.ones(k, dtype=np.int64),
        slot_off=off,
        slot_block=np.zeros(total, dtype=np.int64),
        slot_cnt=np.zeros(total, dtype=np.int64),
        lam=np.zeros(hg.num_nets, dtype=np.int64),
        cut=np.zeros(1),
    )


class Partition:
    """Block assignment of the enabled vertices of a :class:`Hypergraph`."""

    def __init__(self, hg, arrays, epsilon):
        self.hg = hg
        self.p = arrays
        self.epsilon = float(epsilon)

    @classmethod
    def initialize(cls, hg, assignment, k, epsilon=0.03, max_weights=None, allow_empty=False):
        k = int(k)
        if k < 1:
            raise PartitionError("k must be positive")
        p = allocate(hg, k)
        assignment = np.asarray(assignment, dtype=np.int64)
        if assignment.shape != (hg.num_vertices,):
            raise PartitionError("assignment must list a block for every vertex id")
        enabled = hg.a.venabled
        blocks = assignment[enabled]
        if blocks.size and (blocks.min() < 0 or blocks.max() >= k):
            raise PartitionError("unassigned vertex or block id out of range")
        p.part[:] = -1
        p.part[enabled] = blocks
        if max_weights is None:
            p.lmax[:] = max_block_weight(hg.total_weight, k, epsilon)
        else:
            p.lmax[:] = np.asarray(max_weights, dtype=np.float64)
        rebuild(hg.a, p)
        if not allow_empty and (p.bc == 0).any():
            raise PartitionError(f"block {int(np.argmin(p.bc))} is empty")
        return cls(hg, p, epsilon)

    def copy(self):
        return Partition(self.hg, PArrays(*(x.copy() for x in self.p)), self.epsilon)

    # -- queries ----------------------------------------------------------

    @property
    def k(self):
        return int(self.p.bw.shape[0])

    @property
    def cut(self):
        return float(self.p.cut[0])

    @property
    def assignment(self):
        return self.p.part.copy()

    @property
    def block_weights(self):
        return self.p.bw.copy()

    @property
    def block_sizes(self):
        return self.p.bc.copy()

    @property
    def max_block_weight(self):
        return float(self.p.lmax.max())

    def block(self, v):
        return int(self.p.part[v])

    def phi(self, e, i):
        return int(phi(self.p, e, i))

    def connectivity_set(self, e):
        o = self.p.slot_off[e]
        return sorted(int(b) for b in self.p.slot_block[o : o + self.p.lam[e]])

    def connectivity(self, e):
        return int(self.p.lam[e])

    def is_border(self, v):
        return bool(is_border(self.hg.a, self.p, v))

    def imbalance(self):
        return imbalance(self.p.bw, self.hg.total_weight, self.k)

    def is_balanced(self):
        return bool(is_balanced_kernel(self.p))

    # -- updates ----------------------------------------------------------

    def move_vertex(self, v, to):
        frm = int(self.p.part[v])
        if not self.hg.a.venabled[v]:
            raise PartitionError(f"vertex {v} is disabled")
        if to == frm:
            raise PartitionError(f"vertex {v} already in block {to}")
        if not 0 <= to < self.k:
            raise PartitionError(f"block {to} out of range")
        delta = move_vertex(self.hg.a, self.p, v, to)
        return MoveDelta(int(v), frm, int(to), float(delta))

    def rebuild(self):
        rebuild(self.hg.a, self.p)

    # -- verification -------------------------------------------------------

    def recompute_cut(self):
        return cut_from_scratch(self.hg, self.p.part)

    def check_consistency(self):
        hg = self.hg
        part = self.p.part
        for e in hg.enabled_nets():
            pins = hg.pins(e)
            counts = np.bincount(part[pins], minlength=self.k)
            for i in range(self.k):
                assert self.phi(e, i) == counts[i], (e, i)
            assert self.connectivity(e) == int((counts > 0).sum())
        verts = hg.enabled_vertices()
        bw = np.bincount(part[verts], weights=hg.a.vweight[verts], minlength=self.k)
        assert np.allclose(bw, self.p.bw, rtol=0, atol=1e-9)
        assert (np.bincount(part[verts], minlength=self.k) == self.p.bc).all()
        assert abs(self.recompute_cut() - self.cut) <= 1e-9 * max(1.0, abs(self.cut))


def imbalance(block_weights, total_weight, k):
    return float(np.max(block_weights)) / math.ceil(total_weight / k) - 1.0


def cut_from_scratch(hg, part):
    """Total weight of enabled nets whose pins span more than one block."""
    total = 0.0
    for e in hg.enabled_nets():
        blocks = part[hg.pins(e)]
        if blocks.size > 1 and (blocks != blocks[0]).any():
            total += hg.a.nweight[e]
    return total
