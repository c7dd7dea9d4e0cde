"""n-level coarsening: contract the best rated pair, one pair per level.

A single addressable max-heap holds, for each vertex ``u``, its best partner
and the pair's rating

    r(u, v) = 1 / (c(u) c(v)) * sum over shared nets e of w(e) / (|e| - 1).

After a contraction the ratings around the representative are refreshed
according to one of three policies:

``full``     re-rate every neighbour of the representative;
``partial``  re-rate only the vertices whose stored partner was ``u`` or ``v``;
``lazy``     flag the neighbours invalid and re-rate them when popped.
"""

from collections import namedtuple
from dataclasses import dataclass
import math

import numpy as np

from . import heap
from ._jit import kernel, make_rng_state, rng_next, rng_shuffle
from .hypergraph import INC_END, N_ENABLED, contract_kernel

FULL, PARTIAL, LAZY = 0, 1, 2
POLICIES = {"full": FULL, "partial": PARTIAL, "lazy": LAZY}

NEED_GROW = -1

CState = namedtuple(
    "CState",
    [
        "keys", "items", "pos", "size",
        "partner", "invalid", "score", "mark", "stamp", "cand", "pend",
        "lhead", "lnext", "lprev",
        "part", "params", "rng", "out_rep", "out_removed", "stats",
    ],
)
# params: [c_max, target, policy, restrict, fp_seed]
# stats: [contractions, rating evaluations]


@dataclass
class CoarseningConfig:
    variant: str = "lazy"
    s: float = 2.5
    t: int | None = None

    def target(self, k):
        return int(self.t) if self.t is not None else 160 * int(k)

    def c_max(self, total_weight, k):
        return self.s * total_weight / self.target(k)


# ---------------------------------------------------------------------------
# kernels


@kernel
def _l_unlink(cs, x):
    w = cs.partner[x]
    if w < 0:
        return
    p = cs.lprev[x]
    nx = cs.lnext[x]
    if p >= 0:
        cs.lnext[p] = nx
    else:
        cs.lhead[w] = nx
    if nx >= 0:
        cs.lprev[nx] = p
    cs.lprev[x] = -1
    cs.lnext[x] = -1


@kernel
def _l_link(cs, x, w):
    h = cs.lhead[w]
    cs.lnext[x] = h
    cs.lprev[x] = -1
    if h >= 0:
        cs.lprev[h] = x
    cs.lhead[w] = x


@kernel
def best_partner_kernel(h, cs, u):
    """Return ``(partner, rating)`` for ``u``; partner is -1 if none is eligible."""
    cs.stats[1] += 1
    cs.stamp[0] += 1
    stamp = cs.stamp[0]
    cs.mark[u] = stamp
    ncand = 0
    ib = h.inc_begin[u]
    for i in range(h.inc_size[u]):
        e = h.inc[ib + i]
        s = h.nsize[e]
        if s < 2:
            continue
        w = h.nweight[e] / (s - 1)
        b = h.pin_begin[e]
        for t in range(s):
            x = h.pins[b + t]
            if cs.mark[x] != stamp:
                cs.mark[x] = stamp
                cs.score[x] = 0.0
                cs.cand[ncand] = x
                ncand += 1
            cs.score[x] += w
    cs.stamp[1] = ncand
    c_max = cs.params[0]
    restrict = cs.params[3] != 0
    cu = h.vweight[u]
    best = -1
    best_r = -1.0
    ties = 0
    for i in range(ncand):
        x = cs.cand[i]
        cx = h.vweight[x]
        if cu + cx > c_max:
            continue
        if restrict and cs.part[x] != cs.part[u]:
            continue
        denom = cu * cx
        r = cs.score[x] / denom if denom > 0 else math.inf
        if r > best_r:
            best_r = r
            best = x
            ties = 1
        elif r == best_r:
            ties += 1
            if rng_next(cs.rng) % ties == 0:
                best = x
    return best, best_r


@kernel
def _update(h, cs, u):
    best, r = best_partner_kernel(h, cs, u)
    # the reverse partner lists are only read by the partial policy
    lists = int(cs.params[2]) == PARTIAL
    if lists:
        _l_unlink(cs, u)
    if best < 0:
        cs.partner[u] = -1
        if cs.pos[0, u] >= 0:
            heap.heap_remove(cs.keys, cs.items, cs.pos, cs.size, 0, u)
        return
    cs.partner[u] = best
    if lists:
        _l_link(cs, u, best)
    heap.heap_upsert(cs.keys, cs.items, cs.pos, cs.size, 0, u, r)


@kernel
def init_kernel(h, cs):
    n = h.vweight.shape[0]
    cnt = 0
    for v in range(n):
        if h.venabled[v]:
            cs.pend[cnt] = v
            cnt += 1
    rng_shuffle(cs.rng, cs.pend, cnt)
    for i in range(cnt):
        _update(h, cs, cs.pend[i])


@kernel
def coarsen_kernel(h, cs, max_steps):
    """Contract pairs until the target size is reached or the heap is empty.

    Returns the number of contractions done in this call, or ``NEED_GROW``
    when the incidence array must be enlarged first (no state is lost; the
    call can simply be repeated).
    """
    target = cs.params[1]
    policy = int(cs.params[2])
    restrict = cs.params[3] != 0
    seed = int(cs.params[4])
    c_max = cs.params[0]
    done = 0
    while done < max_steps and h.counts[N_ENABLED] > target and cs.size[0] > 0:
        u = np.int64(cs.items[0, 0])
        if policy == LAZY and cs.invalid[u]:
            cs.invalid[u] = False
            _update(h, cs, u)
            continue
        v = cs.partner[u]
        if (
            v < 0
            or not h.venabled[v]
            or h.vweight[u] + h.vweight[v] > c_max
            or (restrict and cs.part[u] != cs.part[v])
        ):
            _update(h, cs, u)
            continue
        if h.counts[INC_END] + h.inc_size[u] + h.inc_size[v] > h.inc.shape[0]:
            return NEED_GROW

        if cs.pos[0, v] >= 0:
            heap.heap_remove(cs.keys, cs.items, cs.pos, cs.size, 0, v)
        if policy == PARTIAL:
            _l_unlink(cs, v)
        cs.partner[v] = -1
        cs.invalid[v] = False

        # vertices whose stored partner is u or v, taken before re-rating
        nl = 0
        if policy == PARTIAL:
            for side in range(2):
                x = cs.lhead[u] if side == 0 else cs.lhead[v]
                while x >= 0:
                    if x != u:
                        cs.pend[nl] = x
                        nl += 1
                    x = cs.lnext[x]

        contract_kernel(h, u, v, seed, cs.out_rep, cs.out_removed)
        cs.stats[0] += 1
        done += 1
        cs.invalid[u] = False
        _update(h, cs, u)

        if policy == PARTIAL:
            for i in range(nl):
                _update(h, cs, cs.pend[i])
        else:
            # rating u just collected its neighbourhood in cand
            ncand = cs.stamp[1]
            if policy == FULL:
                for i in range(ncand):
                    cs.pend[i] = cs.cand[i]
                for i in range(ncand):
                    _update(h, cs, cs.pend[i])
            else:
                for i in range(ncand):
                    cs.invalid[cs.cand[i]] = True
    return done


# ---------------------------------------------------------------------------
# python side


def rate(hg, u, v):
    """Rating of the pair ``(u, v)`` computed directly from the pin lists."""
    shared = set(hg.incident_nets(u).tolist()) & set(hg.incident_nets(v).tolist())
    total = 0.0
    for e in shared:
        s = hg.net_size(e)
        if s > 1:
            total += hg.net_weight(e) / (s - 1)
    return total / (hg.vertex_weight(u) * hg.vertex_weight(v))


def _state(hg, c_max, target, policy, rng, part=None, fp_seed=0):
    n = hg.num_vertices
    keys, items, pos, size = heap.allocate(1, n)
    restrict = part is not None
    if part is None:
        part = np.zeros(n, dtype=np.int64)
    m = max(hg.num_nets, 1)
    return CState(
        keys=keys, items=items, pos=pos, size=size,
        partner=np.full(n, -1, dtype=np.int64),
        invalid=np.zeros(n, dtype=np.bool_),
        score=np.zeros(n),
        mark=np.zeros(n, dtype=np.int64),
        stamp=np.zeros(2, dtype=np.int64),
        cand=np.zeros(max(n, 1), dtype=np.int64),
        pend=np.zeros(max(n, 1), dtype=np.int64),
        lhead=np.full(n, -1, dtype=np.int64),
        lnext=np.full(n, -1, dtype=np.int64),
        lprev=np.full(n, -1, dtype=np.int64),
        part=np.asarray(part, dtype=np.int64),
        params=np.array([c_max, target, policy, 1.0 if restrict else 0.0, float(fp_seed)]),
        rng=rng,
        out_rep=np.zeros(m, dtype=np.int64),
        out_removed=np.zeros(m, dtype=np.int64),
        stats=np.zeros(2, dtype=np.int64),
    )


def best_partner(hg, u, rng, c_max=math.inf, part=None):
    """Best rated eligible neighbour of ``u`` as ``(v, rating)`` or ``None``.

    ``rng`` is a kernel RNG state (see :func:`hyperpart._jit.make_rng_state`)
    used to break ties uniformly.
    """
    cs = _state(hg, c_max, 0, FULL, rng, part)
    v, r = best_partner_kernel(hg.a, cs, u)
    if v < 0:
        return None
    return int(v), float(r)


class Coarsener:
    """Incremental coarsening driver around :func:`coarsen_kernel`.

    ``part`` restricts contractions to pairs inside the same block.
    """

    def __init__(self, hg, c_max, target, variant="lazy", seed=0, part=None, fp_seed=None):
        if variant not in POLICIES:
            raise ValueError(f"unknown coarsening variant {variant!r}")
        self.hg = hg
        self.variant = variant
        rng = make_rng_state(seed, "coarsening")
        if fp_seed is None:
            fp_seed = int(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, 0xF1]).generate_state(1, np.uint32)[0])
        # fingerprint seed travels through a float64 slot, keep it exact
        fp_seed = int(fp_seed) & 0xFFFFFFFFFFFFF
        self.cs = _state(hg, float(c_max), int(target), POLICIES[variant], rng, part, fp_seed)
        init_kernel(hg.a, self.cs)

    @property
    def contractions(self):
        return int(self.cs.stats[0])

    @property
    def ratings_computed(self):
        return int(self.cs.stats[1])

    def queue_items(self):
        """Current heap entries as ``{u: (partner, rating)}``."""
        cs = self.cs
        out = {}
        for i in range(int(cs.size[0])):
            u = int(cs.items[0, i])
            out[u] = (int(cs.partner[u]), float(cs.keys[0, i]))
        return out

    def peek(self):
        """Next entry to be popped as ``(u, partner, rating)`` or ``None``."""
        cs = self.cs
        if cs.size[0] == 0:
            return None
        u = int(cs.items[0, 0])
        return u, int(cs.partner[u]), float(cs.keys[0, 0])

    def run(self, max_steps=None):
        """Contract until done (or ``max_steps`` contractions); return count."""
        limit = np.iinfo(np.int64).max if max_steps is None else int(max_steps)
        start = int(self.cs.stats[0])
        while True:
            r = coarsen_kernel(self.hg.a, self.cs, limit - (int(self.cs.stats[0]) - start))
            if r != NEED_GROW:
                break
            self.hg.ensure_capacity(self.hg.a.inc.shape[0])
        return int(self.cs.stats[0]) - start

    def step(self):
        """Perform at most one contraction; return ``(u, v)`` or ``None``."""
        before = self.hg.depth
        self.run(1)
        if self.hg.depth == before:
            return None
        return self.hg.top_pair()


def coarsen(hg, k, config=None, seed=0, part=None):
    """Coarsen ``hg`` in place; return the number of contractions."""
    config = config or CoarseningConfig()
    c = Coarsener(
        hg,
        config.c_max(hg.total_weight, k),
        config.target(k),
        config.variant,
        seed=seed,
        part=part,
    )
    return c.run()
