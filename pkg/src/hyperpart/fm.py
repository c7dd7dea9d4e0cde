"""Localized k-way FM refinement.

One addressable max-heap per block holds the moves of *active* vertices to
that block, keyed by the exact gain

    g_i(v) = sum w(e) over e in I(v) with Phi(e, i) = |e| - 1
           - sum w(e) over e in I(v) with lambda(e) = 1,

nets of size one ignored.  A search starts from a few seed vertices and grows
around them: every move activates the moved vertex's inactive border
neighbours and updates the keys of active ones by delta-gains.  A net whose
moved pins landed in two different blocks is locked and skipped by the delta
update for the rest of the pass, because its contribution to any remaining
pin's gain can no longer change.

An entry is removed as soon as its block stops being adjacent to the vertex,
so the queues never hold stale moves.  Moves that would overload the target
block or empty the source block are discarded when popped.  After the search
stops, moves are undone back to the best prefix: the least overloaded state,
lowest cut among those, earliest among ties.
"""

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from . import heap
from ._jit import kernel, make_rng_state, rng_next
from .partition import is_border, move_vertex, phi

FREE, LOOSE, LOCKED = 0, 1, 2

# indices into FMState.counts
C_STAMP = 0
C_NTV = 1
C_NTN = 2
C_NMOVES = 3
C_IDLE = 4
C_BEST = 5
C_RSTAMP = 6
C_TOTAL_MOVES = 7
C_TOTAL_KEPT = 8
C_PASSES = 9
C_STOP = 10
C_DISCARDED = 11

# indices into FMState.vals
V_MIN_CUT = 0
V_MIN_MAXW = 1
V_BEST_CUT = 2
V_BEST_OVER = 3
V_START_CUT = 4

FMState = namedtuple(
    "FMState",
    [
        "keys", "items", "pos", "size",
        "active", "marked", "touched", "vmark",
        "net_state", "loose_block", "tnets", "tverts",
        "mv_v", "mv_from", "mv_to", "mv_gain", "mv_delta",
        "omega", "rmark", "rlist",
        "counts", "vals", "rng", "pair",
    ],
)


def allocate(hg, k, seed=0, stream="fm", c_stop=200):
    n = hg.num_vertices
    m = max(hg.num_nets, 1)
    keys, items, pos, size = heap.allocate(k, n)
    counts = np.zeros(12, dtype=np.int64)
    counts[C_STOP] = c_stop
    return FMState(
        keys=keys, items=items, pos=pos, size=size,
        active=np.zeros(n, dtype=np.bool_),
        marked=np.zeros(n, dtype=np.bool_),
        touched=np.zeros(n, dtype=np.bool_),
        vmark=np.zeros(n, dtype=np.int64),
        net_state=np.zeros(m, dtype=np.int8),
        loose_block=np.full(m, -1, dtype=np.int64),
        tnets=np.zeros(m, dtype=np.int64),
        tverts=np.zeros(max(n, 1), dtype=np.int64),
        mv_v=np.zeros(max(n, 1), dtype=np.int64),
        mv_from=np.zeros(max(n, 1), dtype=np.int64),
        mv_to=np.zeros(max(n, 1), dtype=np.int64),
        mv_gain=np.zeros(max(n, 1)),
        mv_delta=np.zeros(max(n, 1)),
        omega=np.zeros(k),
        rmark=np.zeros(k, dtype=np.int64),
        rlist=np.zeros(k, dtype=np.int64),
        counts=counts,
        vals=np.zeros(5),
        rng=make_rng_state(seed, stream),
        pair=np.zeros(2, dtype=np.int64),
    )


# ---------------------------------------------------------------------------
# gains


@kernel
def gain(h, p, v, i):
    """From-scratch gain of moving ``v`` to block ``i``."""
    g = 0.0
    ib = h.inc_begin[v]
    for t in range(h.inc_size[v]):
        e = h.inc[ib + t]
        s = h.nsize[e]
        if s < 2:
            continue
        if p.lam[e] == 1:
            g -= h.nweight[e]
        elif phi(p, e, i) == s - 1:
            g += h.nweight[e]
    return g


@kernel
def adjacent(h, p, v, i):
    ib = h.inc_begin[v]
    for t in range(h.inc_size[v]):
        if phi(p, h.inc[ib + t], i) > 0:
            return True
    return False


@kernel
def _insert(fs, v, i, key):
    heap.heap_push(fs.keys, fs.items, fs.pos, fs.size, i, v, key)


@kernel
def _remove_all(fs, v):
    for q in range(fs.size.shape[0]):
        if fs.pos[q, v] >= 0:
            heap.heap_remove(fs.keys, fs.items, fs.pos, fs.size, q, v)


@kernel
def _touch(fs, v):
    if not fs.touched[v]:
        fs.touched[v] = True
        fs.tverts[fs.counts[C_NTV]] = v
        fs.counts[C_NTV] += 1


@kernel
def activate(h, p, fs, v):
    """Insert ``v`` with exact gains for every adjacent block if it is a border vertex."""
    fs.counts[C_RSTAMP] += 1
    rs = fs.counts[C_RSTAMP]
    nr = 0
    w_int = 0.0
    bv = p.part[v]
    ib = h.inc_begin[v]
    for t in range(h.inc_size[v]):
        e = h.inc[ib + t]
        s = h.nsize[e]
        lam = p.lam[e]
        if lam == 1:
            if s > 1:
                w_int += h.nweight[e]
            continue
        o = p.slot_off[e]
        for q in range(lam):
            i = p.slot_block[o + q]
            if fs.rmark[i] != rs:
                fs.rmark[i] = rs
                fs.omega[i] = 0.0
                fs.rlist[nr] = i
                nr += 1
            if lam == 2 and p.slot_cnt[o + q] == s - 1:
                fs.omega[i] += h.nweight[e]
    # only cut nets add blocks, so nr == 0 means v is not a border vertex
    if nr == 0:
        return
    for q in range(nr):
        i = fs.rlist[q]
        if i != bv:
            heap.heap_push(fs.keys, fs.items, fs.pos, fs.size, i, v, fs.omega[i] - w_int)
    fs.active[v] = True
    if not fs.touched[v]:
        fs.touched[v] = True
        fs.tverts[fs.counts[C_NTV]] = v
        fs.counts[C_NTV] += 1


@kernel
def _deactivate(fs, v):
    _remove_all(fs, v)
    fs.active[v] = False


@kernel
def _delta_all_but(fs, u, skip, d):
    for q in range(fs.size.shape[0]):
        if q != skip and fs.pos[q, u] >= 0:
            heap.heap_add_key(fs.keys, fs.items, fs.pos, fs.size, q, u, d)


@kernel
def _delta_one(fs, u, q, d):
    if fs.pos[q, u] >= 0:
        heap.heap_add_key(fs.keys, fs.items, fs.pos, fs.size, q, u, d)


@kernel
def update_neighbors(h, p, fs, v, a, b):
    """Bring the queues up to date after ``v`` moved from ``a`` to ``b``."""
    ib = h.inc_begin[v]
    ni = h.inc_size[v]
    # delta gains for active pins of critical nets that are not locked
    for t in range(ni):
        e = h.inc[ib + t]
        s = h.nsize[e]
        if s < 2:
            continue
        st = fs.net_state[e]
        if st != LOCKED:
            pa = phi(p, e, a)
            pb = phi(p, e, b)
            c1 = pa == s - 1
            c2 = pb == s
            c3 = pb == s - 1
            c4 = pa == s - 2
            if c1 or c2 or c3 or c4:
                w = h.nweight[e]
                pbeg = h.pin_begin[e]
                for r in range(s):
                    u = h.pins[pbeg + r]
                    if u == v or not fs.active[u]:
                        continue
                    bu = p.part[u]
                    if c1:
                        _delta_all_but(fs, u, a, w)
                    if c2:
                        _delta_all_but(fs, u, b, -w)
                    if c3 and bu != b:
                        _delta_one(fs, u, b, w)
                    if c4 and bu != a:
                        _delta_one(fs, u, a, -w)
        if st == FREE:
            fs.net_state[e] = LOOSE
            fs.loose_block[e] = b
            fs.tnets[fs.counts[C_NTN]] = e
            fs.counts[C_NTN] += 1
        elif st == LOOSE and fs.loose_block[e] != b:
            fs.net_state[e] = LOCKED

    # second sweep: active pins get their adjacency changes applied, or are
    # dropped once they stopped being border vertices; inactive border pins
    # are activated with exact gains.  Both steps read the current state only,
    # so they may be interleaved.
    fs.counts[C_STAMP] += 1
    stamp = fs.counts[C_STAMP]
    fs.vmark[v] = stamp
    for t in range(ni):
        e = h.inc[ib + t]
        s = h.nsize[e]
        if s < 2:
            continue
        pa = phi(p, e, a)
        pb = phi(p, e, b)
        grew = pb == 1
        shrank = pa == 0
        internal = pb == s
        pbeg = h.pin_begin[e]
        for r in range(s):
            u = h.pins[pbeg + r]
            if fs.active[u]:
                if internal and not is_border(h, p, u):
                    _deactivate(fs, u)
                    continue
                if grew and p.part[u] != b and fs.pos[b, u] < 0:
                    heap.heap_push(fs.keys, fs.items, fs.pos, fs.size, b, u, gain(h, p, u, b))
                if shrank and fs.pos[a, u] >= 0 and not adjacent(h, p, u, a):
                    heap.heap_remove(fs.keys, fs.items, fs.pos, fs.size, a, u)
            elif fs.vmark[u] != stamp:
                fs.vmark[u] = stamp
                if not fs.marked[u]:
                    activate(h, p, fs, u)


# ---------------------------------------------------------------------------
# pass machinery


@kernel
def _overload(p):
    worst = 0.0
    for i in range(p.bw.shape[0]):
        d = p.bw[i] - p.lmax[i]
        if d > worst:
            worst = d
    return worst


@kernel
def _max_weight(p):
    worst = p.bw[0]
    for i in range(1, p.bw.shape[0]):
        if p.bw[i] > worst:
            worst = p.bw[i]
    return worst


@kernel
def begin_pass(h, p, fs, seeds, nseeds):
    fs.counts[C_NMOVES] = 0
    fs.counts[C_IDLE] = 0
    fs.counts[C_BEST] = 0
    cut = p.cut[0]
    fs.vals[V_START_CUT] = cut
    fs.vals[V_MIN_CUT] = cut
    fs.vals[V_MIN_MAXW] = _max_weight(p)
    fs.vals[V_BEST_CUT] = cut
    fs.vals[V_BEST_OVER] = _overload(p)
    for t in range(nseeds):
        v = seeds[t]
        if h.venabled[v] and not fs.active[v] and not fs.marked[v]:
            activate(h, p, fs, v)


@kernel
def _select(p, fs):
    """Pick the enabled queue with the largest top key, ties at random."""
    best_q = -1
    best_key = 0.0
    ties = 0
    for q in range(fs.size.shape[0]):
        if fs.size[q] == 0 or p.bw[q] >= p.lmax[q]:
            continue
        key = fs.keys[q, 0]
        if best_q < 0 or key > best_key:
            best_q = q
            best_key = key
            ties = 1
        elif key == best_key:
            ties += 1
            if rng_next(fs.rng) % ties == 0:
                best_q = q
    return best_q


@kernel
def step(h, p, fs):
    """Perform one move.  Returns the moved vertex or -1 if the search is exhausted."""
    while True:
        q = _select(p, fs)
        if q < 0:
            return -1
        v = np.int64(fs.items[q, 0])
        key = fs.keys[q, 0]
        a = p.part[v]
        if (
            fs.marked[v]
            or p.bw[q] + h.vweight[v] > p.lmax[q]
            or p.bc[a] <= p.min_count[a]
        ):
            heap.heap_remove(fs.keys, fs.items, fs.pos, fs.size, q, v)
            fs.counts[C_DISCARDED] += 1
            continue
        _remove_all(fs, v)
        fs.active[v] = False
        fs.marked[v] = True
        _touch(fs, v)
        delta = move_vertex(h, p, v, q)
        j = fs.counts[C_NMOVES]
        fs.mv_v[j] = v
        fs.mv_from[j] = a
        fs.mv_to[j] = q
        fs.mv_gain[j] = key
        fs.mv_delta[j] = delta
        fs.counts[C_NMOVES] = j + 1
        fs.counts[C_TOTAL_MOVES] += 1
        update_neighbors(h, p, fs, v, a, q)

        cut = p.cut[0]
        over = _overload(p)
        if over < fs.vals[V_BEST_OVER] or (over == fs.vals[V_BEST_OVER] and cut < fs.vals[V_BEST_CUT]):
            fs.vals[V_BEST_OVER] = over
            fs.vals[V_BEST_CUT] = cut
            fs.counts[C_BEST] = j + 1
        maxw = _max_weight(p)
        fs.counts[C_IDLE] += 1
        if cut < fs.vals[V_MIN_CUT]:
            fs.vals[V_MIN_CUT] = cut
            fs.counts[C_IDLE] = 0
        if maxw < fs.vals[V_MIN_MAXW]:
            fs.vals[V_MIN_MAXW] = maxw
            fs.counts[C_IDLE] = 0
        return v


@kernel
def end_pass(h, p, fs):
    """Undo moves after the best prefix and reset the pass state.  Returns the kept move count."""
    best = fs.counts[C_BEST]
    for j in range(fs.counts[C_NMOVES] - 1, best - 1, -1):
        move_vertex(h, p, fs.mv_v[j], fs.mv_from[j])
    for q in range(fs.size.shape[0]):
        heap.heap_clear(fs.items, fs.pos, fs.size, q)
    for t in range(fs.counts[C_NTV]):
        v = fs.tverts[t]
        fs.active[v] = False
        fs.marked[v] = False
        fs.touched[v] = False
    fs.counts[C_NTV] = 0
    for t in range(fs.counts[C_NTN]):
        e = fs.tnets[t]
        fs.net_state[e] = FREE
        fs.loose_block[e] = -1
    fs.counts[C_NTN] = 0
    fs.counts[C_TOTAL_KEPT] += best
    fs.counts[C_PASSES] += 1
    return best


@kernel
def run_pass(h, p, fs, seeds, nseeds):
    """One complete pass; returns the cut reduction it achieved."""
    start = p.cut[0]
    begin_pass(h, p, fs, seeds, nseeds)
    c_stop = fs.counts[C_STOP]
    while fs.counts[C_IDLE] < c_stop:
        if step(h, p, fs) < 0:
            break
    end_pass(h, p, fs)
    return start - p.cut[0]


@kernel
def refine_kernel(h, p, fs, seeds, nseeds, max_passes):
    """Repeat passes from the same seeds while they reduce the cut."""
    total = 0.0
    for _ in range(max_passes):
        before_over = _overload(p)
        gained = run_pass(h, p, fs, seeds, nseeds)
        total += gained
        if gained <= 0.0 and _overload(p) >= before_over:
            break
    return total


@kernel
def refine_pair(h, p, fs, u, v, max_passes):
    if not is_border(h, p, u) and not is_border(h, p, v):
        return 0.0
    pair = fs.pair
    pair[0] = u
    pair[1] = v
    return refine_kernel(h, p, fs, pair, 2, max_passes)


# ---------------------------------------------------------------------------
# python side


@dataclass
class PassResult:
    cut_before: float
    cut_after: float
    moves_attempted: int
    moves_kept: int


class FMRefiner:
    """Python handle on the FM kernels for one partition."""

    def __init__(self, partition, seed=0, c_stop=200, stream="fm"):
        self.partition = partition
        self.hg = partition.hg
        self.fs = allocate(self.hg, partition.k, seed, stream, c_stop)

    @property
    def _args(self):
        return self.hg.a, self.partition.p, self.fs

    # step-level access, used by tests
    def begin(self, seeds):
        seeds = np.asarray(seeds, dtype=np.int64)
        begin_pass(*self._args, seeds, seeds.size)

    def step(self):
        v = step(*self._args)
        return None if v < 0 else int(v)

    def end(self):
        return int(end_pass(*self._args))

    def last_move(self):
        j = int(self.fs.counts[C_NMOVES]) - 1
        fs = self.fs
        return int(fs.mv_v[j]), int(fs.mv_from[j]), int(fs.mv_to[j]), float(fs.mv_gain[j]), float(fs.mv_delta[j])

    def queue_entries(self):
        """All live entries as ``(vertex, block, key)`` triples."""
        fs = self.fs
        out = []
        for q in range(fs.size.shape[0]):
            for t in range(int(fs.size[q])):
                out.append((int(fs.items[q, t]), q, float(fs.keys[q, t])))
        return out

    def is_active(self, v):
        return bool(self.fs.active[v])

    def gain(self, v, i):
        return float(gain(self.hg.a, self.partition.p, v, i))

    # whole passes
    def pass_(self, seeds):
        before = self.partition.cut
        moves0 = int(self.fs.counts[C_TOTAL_MOVES])
        self.begin(seeds)
        c_stop = int(self.fs.counts[C_STOP])
        while self.fs.counts[C_IDLE] < c_stop:
            if self.step() is None:
                break
        kept = self.end()
        return PassResult(before, self.partition.cut, int(self.fs.counts[C_TOTAL_MOVES]) - moves0, kept)

    def refine(self, seeds, max_passes=1 << 30):
        seeds = np.asarray(seeds, dtype=np.int64)
        return float(refine_kernel(*self._args, seeds, seeds.size, max_passes))

    def refine_pair(self, u, v, max_passes=1 << 30):
        return float(refine_pair(*self._args, u, v, max_passes))


def gain_from_scratch(hg, part, v, i):
    """Gain of moving ``v`` to ``i`` by recomputing the cut."""
    from .partition import cut_from_scratch

    before = cut_from_scratch(hg, part)
    moved = part.copy()
    moved[v] = i
    return before - cut_from_scratch(hg, moved)
