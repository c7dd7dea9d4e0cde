import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import hypergraphs, random_hypergraph
from oracles import identical_net_groups
from hyperpart import Coarsener, CoarseningConfig, Hypergraph, coarsen
from hyperpart._jit import make_rng_state
from hyperpart.coarsening import best_partner, rate


def neighbours(hg, u):
    out = set()
    for e in hg.incident_nets(u):
        if len(hg.pins(e)) > 1:
            out.update(int(x) for x in hg.pins(e))
    out.discard(u)
    return out


def best_rating(hg, u, c_max):
    vals = [rate(hg, u, v) for v in neighbours(hg, u) if hg.vertex_weight(u) + hg.vertex_weight(v) <= c_max]
    return max(vals) if vals else None


def test_rate_examples():
    hg = Hypergraph.build(3, [[0, 1, 2]])
    assert rate(hg, 0, 1) == 0.5
    hg = Hypergraph.build(3, [[0, 1], [0, 1, 2]])
    assert rate(hg, 0, 1) == 1.5
    hg = Hypergraph.build(2, [[0, 1]], net_weights=[4.0], vertex_weights=[2.0, 1.0])
    assert rate(hg, 0, 1) == 2.0


def test_best_partner_examples():
    hg = Hypergraph.build(4, [[0, 1, 2], [0, 2], [1, 2]])
    assert best_partner(hg, 3, make_rng_state(0, "t")) is None
    # partner 1 scores 0.5, partner 2 scores 1.5
    assert best_partner(hg, 0, make_rng_state(0, "t")) == (2, 1.5)
    # heavy partners are excluded
    assert best_partner(hg, 0, make_rng_state(0, "t"), c_max=1.5) is None


def test_best_partner_ties_are_uniform():
    hg = Hypergraph.build(3, [[0, 1], [0, 2]])
    picks = [best_partner(hg, 0, make_rng_state(s, "ties"))[0] for s in range(10_000)]
    freq = picks.count(1) / len(picks)
    assert abs(freq - 0.5) <= 0.05


def test_h0_single_contraction(h0):
    n = coarsen(h0, 2, CoarseningConfig(variant="lazy", t=3, s=10.0))
    assert n == 1 and h0.depth == 1 and h0.current_num_vertices == 3


def test_heavy_vertices_never_contract(h0):
    c = Coarsener(h0, c_max=1.5, target=1)
    assert c.run() == 0
    assert c.peek() is None


@pytest.mark.parametrize("variant", ["full", "partial", "lazy"])
@given(hg=hypergraphs(max_n=40, max_m=60, max_size=5), seed=st.integers(0, 1000), target=st.integers(1, 10))
def test_structural_postconditions(variant, hg, seed, target):
    total = hg.total_weight
    input_singles = {int(e) for e in hg.enabled_nets() if len(hg.pins(e)) == 1}
    c_max = max(2.0 * total / max(target, 1), 1.0)
    c = Coarsener(hg, c_max, target, variant, seed=seed)
    while True:
        pair = c.step()
        if pair is None:
            break
        u, _ = pair
        inc = hg.incident_nets(u).tolist()
        assert all(len(hg.pins(e)) >= 2 for e in inc)
        assert identical_net_groups(hg, inc) == set()
    hg.check_consistency()
    assert hg.total_weight == total
    assert hg.current_num_vertices <= target or c.peek() is None
    for e in hg.enabled_nets():
        assert len(hg.pins(e)) >= 2 or int(e) in input_singles
    # no contraction pushed a vertex past c_max unless it started heavier
    for v in hg.enabled_vertices():
        assert hg.vertex_weight(v) <= max(c_max, 4.0)


@given(hg=hypergraphs(max_n=30, max_m=50, max_size=5), seed=st.integers(0, 1000))
def test_full_policy_pops_true_maximum(hg, seed):
    c_max = hg.total_weight
    c = Coarsener(hg, c_max, 1, "full", seed=seed)
    while True:
        for u, (v, r) in c.queue_items().items():
            assert r == pytest.approx(best_rating(hg, u, c_max), rel=1e-12)
        top = c.peek()
        ratings = [best_rating(hg, u, c_max) for u in hg.enabled_vertices()]
        ratings = [r for r in ratings if r is not None]
        if top is None:
            assert not ratings
            break
        assert top[2] == pytest.approx(max(ratings), rel=1e-12)
        assert c.step() is not None


def test_restricted_coarsening_keeps_blocks():
    rng = np.random.default_rng(5)
    hg = random_hypergraph(rng, 80, 120, weighted=False)
    part = rng.integers(0, 3, 80)
    c = Coarsener(hg, math.inf, 1, "lazy", seed=2, part=part)
    while (pair := c.step()) is not None:
        u, v = pair
        assert part[u] == part[v]
    # nothing left to merge inside a block
    for u in hg.enabled_vertices():
        assert all(part[v] != part[u] for v in neighbours(hg, int(u)))


def test_unknown_variant(h0):
    with pytest.raises(ValueError):
        Coarsener(h0, 10.0, 2, "eager")


def test_coarsening_is_seed_deterministic():
    rng = np.random.default_rng(9)
    hg = random_hypergraph(rng, 200, 300)
    a, b = hg.copy(), hg.copy()
    coarsen(a, 2, CoarseningConfig(t=20), seed=4)
    coarsen(b, 2, CoarseningConfig(t=20), seed=4)
    assert a.snapshot() == b.snapshot()
