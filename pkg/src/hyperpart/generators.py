"""Random test instances.

``netlist`` mimics circuit hypergraphs: vertices sit on a grid, nets are
small and local with a heavy tail of larger nets.  ``uniform`` draws pins
without any locality and is mostly useful for stress tests.
"""

import numpy as np

from .hypergraph import Hypergraph


def _net_size(rng, max_size):
    # mostly 2- and 3-pin nets, occasionally bigger ones
    s = 2 + int(rng.geometric(0.45)) - 1
    if rng.random() < 0.03:
        s += int(rng.integers(4, 16))
    return min(s, max_size)


def netlist(n, nets_per_vertex=1.2, seed=0, locality=3):
    """Grid-local hypergraph with unit weights and ``round(n * nets_per_vertex)`` nets."""
    rng = np.random.default_rng(seed)
    side = int(np.ceil(np.sqrt(n)))
    m = int(round(n * nets_per_vertex))
    nets = []
    for _ in range(m):
        s = _net_size(rng, n)
        c = int(rng.integers(0, n))
        cx, cy = divmod(c, side)
        r = locality + s // 2
        pins = {c}
        tries = 0
        while len(pins) < s and tries < 50 * s:
            tries += 1
            x = cx + int(rng.integers(-r, r + 1))
            y = cy + int(rng.integers(-r, r + 1))
            if 0 <= y < side:
                v = x * side + y
                if 0 <= v < n:
                    pins.add(v)
        nets.append(sorted(pins))
    return Hypergraph.build(n, nets)


def uniform(n, m, max_size=6, seed=0, weighted=False):
    """Nets with uniformly random pins; optional random integer weights."""
    rng = np.random.default_rng(seed)
    nets = []
    for _ in range(m):
        s = int(rng.integers(1, min(n, max_size) + 1))
        nets.append(sorted(rng.choice(n, size=s, replace=False).tolist()))
    if weighted:
        return Hypergraph.build(
            n,
            nets,
            net_weights=rng.integers(1, 6, m).astype(float),
            vertex_weights=rng.integers(1, 4, n).astype(float),
        )
    return Hypergraph.build(n, nets)


def two_halves(n_half, nets_per_half, seed=0):
    """Two disconnected copies of a random netlist on ``n_half`` vertices each."""
    a = netlist(n_half, nets_per_half / n_half, seed=seed)
    nets = [a.pins(e).tolist() for e in range(a.num_nets)]
    nets += [[p + n_half for p in net] for net in nets]
    return Hypergraph.build(2 * n_half, nets)


def benchmark_suite(count=20, n=5000, seed=0):
    """Fixed family of ``count`` sparse netlists with about ``n`` vertices.

    Sizes vary by up to 5 % around ``n``; density and locality vary per
    instance.  Returns ``(name, hypergraph)`` pairs.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        size = int(rng.integers(int(n * 0.95), int(n * 1.05) + 1))
        density = float(rng.uniform(0.9, 1.1))
        locality = int(rng.integers(1, 3))
        name = f"net{i:02d}-n{size}-d{density:.2f}-l{locality}"
        out.append((name, netlist(size, nets_per_vertex=density, seed=int(rng.integers(1 << 31)), locality=locality)))
    return out
