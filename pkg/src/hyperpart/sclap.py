"""Size-constrained label propagation refinement.

Starting from the uncontracted pair, each round visits the queued vertices in
random order and moves a vertex to the adjacent block with the largest gain,
breaking ties first by the larger drop in total connectivity and then at
random.  A vertex only moves if that (gain, connectivity drop) pair beats
staying put, which scores (0, 0).  Neighbours of moved vertices form the next
round's queue.
"""

from collections import namedtuple

import numpy as np

from ._jit import kernel, make_rng_state, rng_next, rng_shuffle
from .partition import move_vertex, phi

SState = namedtuple(
    "SState",
    [
        "q1", "q2", "inq", "vmark",
        "omega", "cd", "rmark", "rlist",
        "log_v", "log_from", "log_to", "log_gain", "log_cut",
        "counts", "rng", "pair",
    ],
)
# counts: [rstamp, vstamp, logged, moves, rounds, max_rounds]


def allocate(hg, k, seed=0, stream="sclap", rounds=5, log_capacity=0):
    n = max(hg.num_vertices, 1)
    counts = np.zeros(6, dtype=np.int64)
    counts[5] = rounds
    cap = int(log_capacity)
    return SState(
        q1=np.zeros(n, dtype=np.int64),
        q2=np.zeros(n, dtype=np.int64),
        inq=np.zeros(n, dtype=np.bool_),
        vmark=np.zeros(n, dtype=np.int64),
        omega=np.zeros(k),
        cd=np.zeros(k, dtype=np.int64),
        rmark=np.zeros(k, dtype=np.int64),
        rlist=np.zeros(k, dtype=np.int64),
        log_v=np.zeros(cap, dtype=np.int64),
        log_from=np.zeros(cap, dtype=np.int64),
        log_to=np.zeros(cap, dtype=np.int64),
        log_gain=np.zeros(cap),
        log_cut=np.zeros(cap),
        counts=counts,
        rng=make_rng_state(seed, stream),
        pair=np.zeros(2, dtype=np.int64),
    )


@kernel
def sclap_gain(h, p, v, e, i):
    """Contribution of net ``e`` to the gain of moving ``v`` to block ``i``."""
    s = h.nsize[e]
    if s < 2:
        return 0.0
    lam = p.lam[e]
    if lam == 1 and p.part[v] != i:
        return -h.nweight[e]
    if lam == 2 and phi(p, e, i) == s - 1:
        return h.nweight[e]
    return 0.0


@kernel
def connectivity_decrease(h, p, v, i):
    """Drop in the summed connectivity of I(v) if ``v`` moved to ``i``."""
    b = p.part[v]
    d = 0
    ib = h.inc_begin[v]
    for t in range(h.inc_size[v]):
        e = h.inc[ib + t]
        if phi(p, e, b) == 1:
            d += 1
        if phi(p, e, i) == 0:
            d -= 1
    return d


@kernel
def best_move(h, p, ss, v):
    """Best admissible target for ``v`` as ``(block, gain)``; block -1 means stay."""
    b = p.part[v]
    if p.bc[b] <= p.min_count[b]:
        return -1, 0.0
    ss.counts[0] += 1
    rs = ss.counts[0]
    nr = 0
    w_int = 0.0
    leave = 0
    ib = h.inc_begin[v]
    for t in range(h.inc_size[v]):
        e = h.inc[ib + t]
        s = h.nsize[e]
        lam = p.lam[e]
        o = p.slot_off[e]
        if lam == 1:
            if s > 1:
                w_int += h.nweight[e]
            else:
                leave += 1
            continue
        for q in range(lam):
            i = p.slot_block[o + q]
            if i == b:
                if p.slot_cnt[o + q] == 1:
                    leave += 1
                continue
            if ss.rmark[i] != rs:
                ss.rmark[i] = rs
                ss.omega[i] = 0.0
                ss.cd[i] = 0
                ss.rlist[nr] = i
                nr += 1
            # every adjacent block gets +1 for each net it already touches
            ss.cd[i] += 1
            if lam == 2 and p.slot_cnt[o + q] == s - 1:
                ss.omega[i] += h.nweight[e]
    # nets not touching i would gain block i: cd(i) = leave - (|I(v)| - touching(i))
    deg = h.inc_size[v]
    wv = h.vweight[v]
    best = -1
    best_g = 0.0
    best_cd = 0
    ties = 0
    for q in range(nr):
        i = ss.rlist[q]
        if wv + p.bw[i] > p.lmax[i]:
            continue
        g = ss.omega[i] - w_int
        cd = leave - (deg - ss.cd[i])
        if g > best_g or (g == best_g and cd > best_cd):
            best = i
            best_g = g
            best_cd = cd
            ties = 1
        elif best >= 0 and g == best_g and cd == best_cd:
            ties += 1
            if rng_next(ss.rng) % ties == 0:
                best = i
    return best, best_g


@kernel
def refine_kernel(h, p, ss, seeds, nseeds):
    """Label propagation rounds from ``seeds``; returns the number of moves."""
    n1 = 0
    for t in range(nseeds):
        v = seeds[t]
        if h.venabled[v] and not ss.inq[v]:
            ss.inq[v] = True
            ss.q1[n1] = v
            n1 += 1
    for t in range(n1):
        ss.inq[ss.q1[t]] = False
    moves = 0
    rounds = 0
    cap = ss.log_v.shape[0]
    while n1 > 0 and rounds < ss.counts[5]:
        rounds += 1
        rng_shuffle(ss.rng, ss.q1, n1)
        n2 = 0
        for t in range(n1):
            v = ss.q1[t]
            to, g = best_move(h, p, ss, v)
            if to < 0:
                continue
            a = p.part[v]
            move_vertex(h, p, v, to)
            moves += 1
            j = ss.counts[2]
            if j < cap:
                ss.log_v[j] = v
                ss.log_from[j] = a
                ss.log_to[j] = to
                ss.log_gain[j] = g
                ss.log_cut[j] = p.cut[0]
            ss.counts[2] = j + 1
            # queue the neighbourhood for the next round
            ss.counts[1] += 1
            stamp = ss.counts[1]
            ss.vmark[v] = stamp
            ib = h.inc_begin[v]
            for r in range(h.inc_size[v]):
                e = h.inc[ib + r]
                pb = h.pin_begin[e]
                for z in range(h.nsize[e]):
                    x = h.pins[pb + z]
                    if ss.vmark[x] != stamp:
                        ss.vmark[x] = stamp
                        if not ss.inq[x]:
                            ss.inq[x] = True
                            ss.q2[n2] = x
                            n2 += 1
        for t in range(n2):
            ss.q1[t] = ss.q2[t]
            ss.inq[ss.q2[t]] = False
        n1 = n2
    ss.counts[3] += moves
    ss.counts[4] += rounds
    return moves


@kernel
def refine_pair(h, p, ss, u, v):
    pair = ss.pair
    pair[0] = u
    pair[1] = v
    return refine_kernel(h, p, ss, pair, 2)


class SCLaPRefiner:
    """Python handle on the label propagation kernels for one partition."""

    def __init__(self, partition, seed=0, rounds=5, stream="sclap", log_capacity=0):
        self.partition = partition
        self.hg = partition.hg
        self.ss = allocate(self.hg, partition.k, seed, stream, rounds, log_capacity)

    @property
    def _args(self):
        return self.hg.a, self.partition.p, self.ss

    def gain(self, v, e, i):
        return float(sclap_gain(self.hg.a, self.partition.p, v, e, i))

    def connectivity_decrease(self, v, i):
        return int(connectivity_decrease(self.hg.a, self.partition.p, v, i))

    def best_move(self, v):
        to, g = best_move(*self._args, v)
        return (None, 0.0) if to < 0 else (int(to), float(g))

    def refine(self, seeds):
        seeds = np.asarray(seeds, dtype=np.int64)
        return int(refine_kernel(*self._args, seeds, seeds.size))

    def refine_pair(self, u, v):
        return int(refine_pair(*self._args, u, v))

    @property
    def rounds_run(self):
        return int(self.ss.counts[4])

    def move_log(self):
        """Logged moves as ``(vertex, from, to, gain, cut_after)`` tuples."""
        ss = self.ss
        cnt = min(int(ss.counts[2]), ss.log_v.shape[0])
        return [
            (int(ss.log_v[j]), int(ss.log_from[j]), int(ss.log_to[j]), float(ss.log_gain[j]), float(ss.log_cut[j]))
            for j in range(cnt)
        ]
