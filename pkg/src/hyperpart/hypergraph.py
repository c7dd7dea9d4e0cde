"""Semi-dynamic hypergraph with exact contraction and uncontraction.

The hypergraph is stored as a bipartite incidence structure in flat arrays:

* net ``e`` owns the pin segment ``pins[pin_begin[e] : pin_begin[e] + nsize[e]]``;
* vertex ``v`` owns the incidence segment ``inc[inc_begin[v] : inc_begin[v] + inc_size[v]]``.

Contracting ``(u, v)`` overwrites ``v`` by ``u`` in nets that did not contain
``u`` (relink) and swaps ``v`` behind the live end of nets that did (delete).
Relinked nets are appended to ``u``'s incidence segment, which is first copied
to the end of ``inc`` unless it already sits there.  Single-node and parallel
nets created around ``u`` are then disabled.  Every position touched is pushed
to a log so that :meth:`Hypergraph.uncontract` can put each entry back into
the very slot it came from.

All vertex and net ids are 0-based.
"""

from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from ._jit import kernel

# indices into HGArrays.counts
N_ENABLED = 0
M_ENABLED = 1
INC_END = 2
NUM_MEM = 3
POS_SIZE = 4
REM_SIZE = 5
STAMP = 6

HGArrays = namedtuple(
    "HGArrays",
    [
        "vweight", "venabled", "inc_begin", "inc_size", "inc",
        "nweight", "nenabled", "pin_begin", "nsize", "pins",
        "counts",
        "mem_u", "mem_v", "mem_u_begin", "mem_u_size", "mem_relink_end", "mem_inc_end",
        "mem_pos_start", "mem_rem_start", "mem_rem_end", "mem_u_weight", "mem_v_weight",
        "poslog", "rem_net", "rem_rep", "rem_rep_w",
        "net_mark", "vmark", "buf", "fps", "order",
    ],
)


class HypergraphError(ValueError):
    pass


# ---------------------------------------------------------------------------
# kernels


@kernel
def _find(arr, begin, size, x):
    for i in range(size):
        if arr[begin + i] == x:
            return i
    return -1


@kernel
def _next_stamp(h):
    h.counts[STAMP] += 1
    return h.counts[STAMP]


@kernel
def net_fingerprint(h, e, seed):
    b = h.pin_begin[e]
    f = 0
    for i in range(h.nsize[e]):
        f ^= h.pins[b + i] ^ seed
    return f


@kernel
def _remove_net(h, e, rep):
    b = h.pin_begin[e]
    for i in range(h.nsize[e]):
        p = h.pins[b + i]
        ib = h.inc_begin[p]
        s = h.inc_size[p]
        q = _find(h.inc, ib, s, e)
        last = ib + s - 1
        h.inc[ib + q] = h.inc[last]
        h.inc[last] = e
        h.inc_size[p] = s - 1
        h.poslog[h.counts[POS_SIZE]] = q
        h.counts[POS_SIZE] += 1
    h.nenabled[e] = False
    h.counts[M_ENABLED] -= 1
    r = h.counts[REM_SIZE]
    h.rem_net[r] = e
    h.rem_rep[r] = rep
    if rep >= 0:
        h.rem_rep_w[r] = h.nweight[rep]
        h.nweight[rep] += h.nweight[e]
    h.counts[REM_SIZE] = r + 1


@kernel
def _restore_net(h, r):
    e = h.rem_net[r]
    rep = h.rem_rep[r]
    b = h.pin_begin[e]
    for i in range(h.nsize[e] - 1, -1, -1):
        p = h.pins[b + i]
        ib = h.inc_begin[p]
        s = h.inc_size[p] + 1
        h.inc_size[p] = s
        last = ib + s - 1
        h.counts[POS_SIZE] -= 1
        q = h.poslog[h.counts[POS_SIZE]]
        h.inc[last] = h.inc[ib + q]
        h.inc[ib + q] = e
    h.nenabled[e] = True
    h.counts[M_ENABLED] += 1
    if rep >= 0:
        h.nweight[rep] = h.rem_rep_w[r]


@kernel
def _same_pins(h, ea, eb, stamp):
    # pins of ea must already carry ``stamp`` in vmark
    b = h.pin_begin[eb]
    for i in range(h.nsize[eb]):
        if h.vmark[h.pins[b + i]] != stamp:
            return False
    return True


@kernel
def _before(fps, a, b):
    return fps[a] < fps[b] or (fps[a] == fps[b] and a < b)


@kernel
def _sift(fps, order, root, end):
    while True:
        child = 2 * root + 1
        if child >= end:
            return
        if child + 1 < end and _before(fps, order[child], order[child + 1]):
            child += 1
        if not _before(fps, order[root], order[child]):
            return
        tmp = order[root]
        order[root] = order[child]
        order[child] = tmp
        root = child


@kernel
def sort_by_fingerprint(fps, order, n):
    """Heapsort ``order[:n] = 0..n-1`` by ``(fps[i], i)``."""
    for i in range(n):
        order[i] = i
    for i in range(n // 2 - 1, -1, -1):
        _sift(fps, order, i, n)
    for end in range(n - 1, 0, -1):
        tmp = order[0]
        order[0] = order[end]
        order[end] = tmp
        _sift(fps, order, 0, end)


@kernel
def remove_parallel_nets(h, cand, ncand, seed, out_rep, out_removed):
    """Merge nets with identical pin sets among ``cand[:ncand]``.

    Fingerprints are sorted with the candidate index as tie-breaker, so within a run of equal fingerprints
    the representative is the earliest candidate.  Returns the number of
    merged pairs written to ``out_rep``/``out_removed``.
    """
    npairs = 0
    if ncand < 2:
        return npairs
    fps = h.fps
    order = h.order
    for i in range(ncand):
        fps[i] = net_fingerprint(h, cand[i], seed)
    sort_by_fingerprint(fps, order, ncand)
    i = 0
    while i < ncand:
        j = i + 1
        while j < ncand and fps[order[j]] == fps[order[i]]:
            j += 1
        if j - i > 1:
            for a in range(i, j):
                ea = cand[order[a]]
                if not h.nenabled[ea]:
                    continue
                stamp = -1
                for c in range(a + 1, j):
                    eb = cand[order[c]]
                    if not h.nenabled[eb] or h.nsize[eb] != h.nsize[ea]:
                        continue
                    if stamp < 0:
                        stamp = _next_stamp(h)
                        pb = h.pin_begin[ea]
                        for t in range(h.nsize[ea]):
                            h.vmark[h.pins[pb + t]] = stamp
                    if _same_pins(h, ea, eb, stamp):
                        _remove_net(h, eb, ea)
                        out_rep[npairs] = ea
                        out_removed[npairs] = eb
                        npairs += 1
        i = j
    return npairs


@kernel
def contract_kernel(h, u, v, seed, out_rep, out_removed):
    """Merge ``v`` into ``u``.  Caller guarantees incidence capacity."""
    j = h.counts[NUM_MEM]
    h.mem_u[j] = u
    h.mem_v[j] = v
    h.mem_u_begin[j] = h.inc_begin[u]
    h.mem_u_size[j] = h.inc_size[u]
    h.mem_inc_end[j] = h.counts[INC_END]
    h.mem_pos_start[j] = h.counts[POS_SIZE]
    h.mem_rem_start[j] = h.counts[REM_SIZE]
    h.mem_u_weight[j] = h.vweight[u]
    h.mem_v_weight[j] = h.vweight[v]

    h.vweight[u] += h.vweight[v]
    h.venabled[v] = False
    h.counts[N_ENABLED] -= 1

    vb = h.inc_begin[v]
    vs = h.inc_size[v]
    nrel = 0
    for i in range(vs):
        e = h.inc[vb + i]
        b = h.pin_begin[e]
        s = h.nsize[e]
        pu = -1
        pv = -1
        for t in range(s):
            x = h.pins[b + t]
            if x == u:
                pu = t
            elif x == v:
                pv = t
        if pu >= 0:
            last = b + s - 1
            h.pins[b + pv] = h.pins[last]
            h.pins[last] = v
            h.nsize[e] = s - 1
            h.poslog[h.counts[POS_SIZE]] = pv
            h.counts[POS_SIZE] += 1
        else:
            h.pins[b + pv] = u
            h.buf[nrel] = e
            nrel += 1

    if nrel > 0:
        ub = h.inc_begin[u]
        us = h.inc_size[u]
        end = h.counts[INC_END]
        if ub + us != end:
            for t in range(us):
                h.inc[end + t] = h.inc[ub + t]
            h.inc_begin[u] = end
            ub = end
        for t in range(nrel):
            h.inc[ub + us + t] = h.buf[t]
        h.inc_size[u] = us + nrel
        h.counts[INC_END] = ub + us + nrel
    h.mem_relink_end[j] = h.inc_size[u]

    ub = h.inc_begin[u]
    us = h.inc_size[u]
    for t in range(us):
        h.buf[t] = h.inc[ub + t]
    for t in range(us):
        e = h.buf[t]
        if h.nsize[e] == 1:
            _remove_net(h, e, -1)

    ub = h.inc_begin[u]
    us = h.inc_size[u]
    for t in range(us):
        h.buf[t] = h.inc[ub + t]
    npairs = remove_parallel_nets(h, h.buf, us, seed, out_rep, out_removed)

    h.mem_rem_end[j] = h.counts[REM_SIZE]
    h.counts[NUM_MEM] = j + 1
    return npairs


@kernel
def uncontract_kernel(h):
    j = h.counts[NUM_MEM] - 1
    u = h.mem_u[j]
    v = h.mem_v[j]
    for r in range(h.mem_rem_end[j] - 1, h.mem_rem_start[j] - 1, -1):
        _restore_net(h, r)
    h.counts[REM_SIZE] = h.mem_rem_start[j]

    stamp = _next_stamp(h)
    ub = h.inc_begin[u]
    for t in range(h.mem_u_size[j], h.mem_relink_end[j]):
        h.net_mark[h.inc[ub + t]] = stamp

    vb = h.inc_begin[v]
    for i in range(h.inc_size[v] - 1, -1, -1):
        e = h.inc[vb + i]
        b = h.pin_begin[e]
        if h.net_mark[e] == stamp:
            t = _find(h.pins, b, h.nsize[e], u)
            h.pins[b + t] = v
        else:
            s = h.nsize[e] + 1
            h.nsize[e] = s
            h.counts[POS_SIZE] -= 1
            pos = h.poslog[h.counts[POS_SIZE]]
            last = b + s - 1
            h.pins[last] = h.pins[b + pos]
            h.pins[b + pos] = v

    h.inc_begin[u] = h.mem_u_begin[j]
    h.inc_size[u] = h.mem_u_size[j]
    h.counts[INC_END] = h.mem_inc_end[j]
    h.vweight[u] = h.mem_u_weight[j]
    h.venabled[v] = True
    h.counts[N_ENABLED] += 1
    h.counts[NUM_MEM] = j
    return j


@kernel
def neighbors_into(h, u, out):
    """Write the distinct neighbours of ``u`` into ``out``; return count."""
    stamp = _next_stamp(h)
    h.vmark[u] = stamp
    cnt = 0
    ib = h.inc_begin[u]
    for i in range(h.inc_size[u]):
        e = h.inc[ib + i]
        b = h.pin_begin[e]
        for t in range(h.nsize[e]):
            x = h.pins[b + t]
            if h.vmark[x] != stamp:
                h.vmark[x] = stamp
                out[cnt] = x
                cnt += 1
    return cnt


# ---------------------------------------------------------------------------
# python side


@dataclass
class ContractionMemento:
    """Undo record of one contraction.  ``level`` is its stack position."""

    u: int
    v: int
    level: int
    v_weight: float
    relinked: list = field(default_factory=list)
    deleted: list = field(default_factory=list)
    removed_single: list = field(default_factory=list)
    removed_parallel: list = field(default_factory=list)


def fingerprint(pins, seed):
    """XOR of ``pin ^ seed`` over a pin collection, as an unsigned 64-bit int."""
    mask = 0xFFFFFFFFFFFFFFFF
    f = 0
    for p in pins:
        f ^= (int(p) ^ int(seed)) & mask
    return f & mask


def _as_i64_seed(seed):
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return seed - (1 << 64) if seed >= (1 << 63) else seed


class Hypergraph:
    """Weighted hypergraph supporting n-level contraction.

    Build instances with :meth:`build`.  Nets of size one are legal in the
    input; they never count towards the cut and are ignored by ratings and
    gains.
    """

    def __init__(self, arrays):
        self.a = arrays
        self.num_vertices = arrays.vweight.shape[0]
        self.num_nets = arrays.nweight.shape[0]
        self._mementos = []

    # -- construction -------------------------------------------------------

    @classmethod
    def build(cls, num_vertices, nets, net_weights=None, vertex_weights=None):
        n = int(num_vertices)
        if n < 0:
            raise HypergraphError("negative vertex count")
        m = len(nets)
        sizes = np.fromiter((len(p) for p in nets), dtype=np.int64, count=m)
        if m and sizes.min() == 0:
            raise HypergraphError(f"net {int(np.argmin(sizes))} is empty")
        pins = np.fromiter((int(x) for p in nets for x in p), dtype=np.int64, count=int(sizes.sum()))
        pin_begin = np.zeros(m, dtype=np.int64)
        if m:
            pin_begin[1:] = np.cumsum(sizes)[:-1]
        if pins.size and (pins.min() < 0 or pins.max() >= n):
            bad = int(pins[(pins < 0) | (pins >= n)][0])
            raise HypergraphError(f"pin id {bad} out of range [0, {n})")
        for e in range(m):
            seg = pins[pin_begin[e] : pin_begin[e] + sizes[e]]
            if np.unique(seg).size != seg.size:
                raise HypergraphError(f"duplicate pin in net {e}")

        nweight = np.ones(m) if net_weights is None else np.asarray(net_weights, dtype=np.float64).copy()
        vweight = np.ones(n) if vertex_weights is None else np.asarray(vertex_weights, dtype=np.float64).copy()
        if nweight.shape != (m,) or vweight.shape != (n,):
            raise HypergraphError("weight array has wrong length")
        if m and nweight.min() <= 0:
            raise HypergraphError("net weights must be positive")
        if n and vweight.min() <= 0:
            raise HypergraphError("vertex weights must be positive")

        # incidence lists in net order
        deg = np.bincount(pins, minlength=n).astype(np.int64)
        inc_begin = np.zeros(n, dtype=np.int64)
        if n:
            inc_begin[1:] = np.cumsum(deg)[:-1]
        net_of_pin = np.repeat(np.arange(m, dtype=np.int64), sizes)
        order = np.argsort(pins, kind="stable")
        total = int(pins.size)
        inc = np.zeros(max(2 * total + 16, 16), dtype=np.int64)
        inc[:total] = net_of_pin[order]

        counts = np.zeros(8, dtype=np.int64)
        counts[N_ENABLED] = n
        counts[M_ENABLED] = m
        counts[INC_END] = total
        nn = max(n, 1)
        mm = max(m, 1)
        arrays = HGArrays(
            vweight=vweight,
            venabled=np.ones(n, dtype=np.bool_),
            inc_begin=inc_begin,
            inc_size=deg.copy(),
            inc=inc,
            nweight=nweight,
            nenabled=np.ones(m, dtype=np.bool_),
            pin_begin=pin_begin,
            nsize=sizes.copy(),
            pins=pins,
            counts=counts,
            mem_u=np.zeros(nn, np.int64),
            mem_v=np.zeros(nn, np.int64),
            mem_u_begin=np.zeros(nn, np.int64),
            mem_u_size=np.zeros(nn, np.int64),
            mem_relink_end=np.zeros(nn, np.int64),
            mem_inc_end=np.zeros(nn, np.int64),
            mem_pos_start=np.zeros(nn, np.int64),
            mem_rem_start=np.zeros(nn, np.int64),
            mem_rem_end=np.zeros(nn, np.int64),
            mem_u_weight=np.zeros(nn, np.float64),
            mem_v_weight=np.zeros(nn, np.float64),
            poslog=np.zeros(max(total, 1), np.int64),
            rem_net=np.zeros(mm, np.int64),
            rem_rep=np.zeros(mm, np.int64),
            rem_rep_w=np.zeros(mm, np.float64),
            net_mark=np.zeros(mm, np.int64),
            vmark=np.zeros(nn, np.int64),
            buf=np.zeros(max(mm, nn), np.int64),
            fps=np.zeros(mm, np.int64),
            order=np.zeros(mm, np.int64),
        )
        return cls(arrays)

    def copy(self):
        other = Hypergraph(HGArrays(*(x.copy() for x in self.a)))
        other._mementos = list(self._mementos)
        return other

    # -- queries ------------------------------------------------------------

    @property
    def current_num_vertices(self):
        return int(self.a.counts[N_ENABLED])

    @property
    def current_num_nets(self):
        return int(self.a.counts[M_ENABLED])

    @property
    def num_pins(self):
        return int(self.a.pins.size)

    @property
    def current_num_pins(self):
        return int(self.a.nsize[self.a.nenabled].sum())

    @property
    def total_weight(self):
        return float(self.a.vweight[self.a.venabled].sum())

    @property
    def depth(self):
        """Number of contractions currently applied."""
        return int(self.a.counts[NUM_MEM])

    def vertex_weight(self, v):
        return float(self.a.vweight[v])

    def net_weight(self, e):
        return float(self.a.nweight[e])

    def net_size(self, e):
        return int(self.a.nsize[e])

    def is_vertex_enabled(self, v):
        return bool(self.a.venabled[v])

    def is_net_enabled(self, e):
        return bool(self.a.nenabled[e])

    def is_single_node(self, e):
        return int(self.a.nsize[e]) == 1

    def pins(self, e):
        b = self.a.pin_begin[e]
        return self.a.pins[b : b + self.a.nsize[e]].copy()

    def incident_nets(self, v):
        b = self.a.inc_begin[v]
        return self.a.inc[b : b + self.a.inc_size[v]].copy()

    def degree(self, v):
        return int(self.a.inc_size[v])

    def neighbors(self, v):
        out = np.empty(self.num_vertices, dtype=np.int64)
        cnt = neighbors_into(self.a, v, out)
        return out[:cnt].copy()

    def enabled_vertices(self):
        return np.flatnonzero(self.a.venabled)

    def enabled_nets(self):
        return np.flatnonzero(self.a.nenabled)

    def snapshot(self):
        """Hashable structural state: pins, incidences, weights and flags."""
        a = self.a
        nets = tuple(
            (bool(a.nenabled[e]), float(a.nweight[e]), tuple(self.pins(e).tolist()))
            for e in range(self.num_nets)
        )
        verts = tuple(
            (bool(a.venabled[v]), float(a.vweight[v]), tuple(self.incident_nets(v).tolist()))
            for v in range(self.num_vertices)
        )
        return nets, verts

    def check_consistency(self):
        """Raise AssertionError unless the bipartite view is consistent."""
        a = self.a
        for e in self.enabled_nets():
            for p in self.pins(e):
                assert a.venabled[p], f"net {e} has disabled pin {p}"
                assert e in set(self.incident_nets(p).tolist()), f"pin {p} misses net {e}"
        for v in self.enabled_vertices():
            for e in self.incident_nets(v):
                assert a.nenabled[e], f"vertex {v} lists disabled net {e}"
                assert v in set(self.pins(e).tolist()), f"net {e} misses pin {v}"
        assert abs(self.total_weight - float(a.vweight[a.venabled].sum())) == 0.0

    # -- contraction ----------------------------------------------------------

    def ensure_capacity(self, extra):
        a = self.a
        need = int(a.counts[INC_END]) + int(extra)
        if need > a.inc.shape[0]:
            grown = np.zeros(max(2 * a.inc.shape[0], need + 16), dtype=np.int64)
            grown[: a.inc.shape[0]] = a.inc
            self.a = a._replace(inc=grown)

    def contract(self, u, v, seed=0):
        """Merge ``v`` into ``u``; return the undo record."""
        a = self.a
        if u == v:
            raise HypergraphError("cannot contract a vertex with itself")
        if not (a.venabled[u] and a.venabled[v]):
            raise HypergraphError(f"contracting disabled vertex ({u}, {v})")
        self.ensure_capacity(a.inc_size[u] + a.inc_size[v])
        a = self.a
        v_nets = self.incident_nets(v)
        u_nets = set(self.incident_nets(u).tolist())
        rep = np.empty(max(self.num_nets, 1), np.int64)
        removed = np.empty(max(self.num_nets, 1), np.int64)
        npairs = contract_kernel(a, u, v, _as_i64_seed(seed), rep, removed)
        m = self._memento(int(a.counts[NUM_MEM]) - 1, v_nets, u_nets)
        m.removed_parallel = [
            (int(rep[i]), int(removed[i]), float(a.nweight[removed[i]])) for i in range(npairs)
        ]
        self._mementos.append(m)
        return m

    def _memento(self, j, v_nets, u_nets):
        a = self.a
        u = int(a.mem_u[j])
        v = int(a.mem_v[j])
        relinked = [int(e) for e in v_nets if int(e) not in u_nets]
        deleted = [int(e) for e in v_nets if int(e) in u_nets]
        singles = [
            int(a.rem_net[r]) for r in range(a.mem_rem_start[j], a.mem_rem_end[j]) if a.rem_rep[r] < 0
        ]
        return ContractionMemento(
            u=u, v=v, level=j, v_weight=float(a.mem_v_weight[j]),
            relinked=relinked, deleted=deleted, removed_single=singles,
        )

    def uncontract(self, memento=None):
        """Undo the most recent contraction.

        Passing a memento that is not the top of the stack (or one that was
        already undone) raises :class:`HypergraphError`.
        """
        depth = int(self.a.counts[NUM_MEM])
        if depth == 0:
            raise HypergraphError("nothing to uncontract")
        if memento is not None:
            if memento.level != depth - 1 or not self._mementos or self._mementos[-1] is not memento:
                raise HypergraphError("out-of-order uncontraction")
        uncontract_kernel(self.a)
        if self._mementos and self._mementos[-1].level == depth - 1:
            self._mementos.pop()
        return int(self.a.mem_u[depth - 1]), int(self.a.mem_v[depth - 1])

    def top_pair(self):
        j = int(self.a.counts[NUM_MEM]) - 1
        return int(self.a.mem_u[j]), int(self.a.mem_v[j])

    def fingerprint(self, e, seed):
        return int(net_fingerprint(self.a, e, _as_i64_seed(seed))) & 0xFFFFFFFFFFFFFFFF

    def detect_parallel_nets(self, candidates, seed=0):
        """Merge enabled nets in ``candidates`` that share a pin set.

        Returns ``(representative, removed)`` pairs.  The merge is permanent;
        inside :meth:`contract` the same routine is undone by the memento.
        """
        cand = np.asarray([c for c in candidates if self.a.nenabled[c]], dtype=np.int64)
        rep = np.empty(max(cand.size, 1), np.int64)
        removed = np.empty(max(cand.size, 1), np.int64)
        rem_size, pos_size = int(self.a.counts[REM_SIZE]), int(self.a.counts[POS_SIZE])
        npairs = remove_parallel_nets(self.a, cand, cand.size, _as_i64_seed(seed), rep, removed)
        # the removals are not owned by any memento
        self.a.counts[REM_SIZE] = rem_size
        self.a.counts[POS_SIZE] = pos_size
        return [(int(rep[i]), int(removed[i])) for i in range(npairs)]

    def compact(self):
        """Copy of the enabled part with dense ids.

        Returns ``(hypergraph, vertex_ids)`` where ``vertex_ids[i]`` is the
        original id of compact vertex ``i``.
        """
        verts = self.enabled_vertices()
        remap = np.full(self.num_vertices, -1, dtype=np.int64)
        remap[verts] = np.arange(verts.size)
        nets = []
        weights = []
        for e in self.enabled_nets():
            nets.append(remap[self.pins(e)])
            weights.append(self.a.nweight[e])
        sub = Hypergraph.build(verts.size, nets, np.asarray(weights, dtype=np.float64), self.a.vweight[verts])
        return sub, verts
