import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import hypergraphs, random_assignment, random_hypergraph
from oracles import cut as oracle_cut, net_contribution, overload, run_checked_pass
from hyperpart import Hypergraph, Partition
from hyperpart.fm import C_IDLE, FMRefiner, gain_from_scratch


def test_gain_examples(h0):
    p = Partition.initialize(h0, [0, 0, 1, 1], 2)
    fm = FMRefiner(p)
    assert fm.gain(2, 0) == 0.0
    assert fm.gain(3, 0) == -1.0
    for v in range(4):
        assert fm.gain(v, 1 - p.block(v)) == gain_from_scratch(h0, p.p.part, v, 1 - p.block(v))
    hg = Hypergraph.build(3, [[0, 1]])
    q = Partition.initialize(hg, [0, 1, 1], 2)
    assert FMRefiner(q).gain(2, 0) == 0.0


def test_activation_examples(h0):
    p = Partition.initialize(h0, [0, 0, 1, 1], 2, epsilon=1.0)
    fm = FMRefiner(p)
    fm.begin([2])
    assert fm.queue_entries() == [(2, 0, 0.0)]
    fm.end()
    fm.begin([3])
    assert fm.queue_entries() == []
    assert not fm.is_active(3)
    fm.end()


def test_delta_update_example(h0):
    p = Partition.initialize(h0, [0, 0, 1, 1], 2, epsilon=1.0)
    fm = FMRefiner(p, c_stop=10)
    fm.begin([2, 3])
    assert fm.step() == 2
    # {2,3} became cut and vertex 3 is the only pin left in block 1
    assert (3, 0, 1.0) in fm.queue_entries()
    fm.end()


def test_zero_gain_stop_boundary(h0):
    p = Partition.initialize(h0, [0, 0, 1, 1], 2, epsilon=1.0)
    res = FMRefiner(p, c_stop=1).pass_([2, 3])
    assert res.moves_attempted == 1
    assert res.moves_kept == 0
    assert p.cut == 1.0 and p.assignment.tolist() == [0, 0, 1, 1]


def test_local_optimum_is_fixed_point():
    hg = Hypergraph.build(6, [[0, 1, 2], [3, 4, 5], [2, 3]])
    p = Partition.initialize(hg, [0, 0, 0, 1, 1, 1], 2)
    res = FMRefiner(p).pass_(list(range(6)))
    assert res.moves_kept == 0 and p.cut == 1.0


def test_improves_obvious_partition():
    hg = Hypergraph.build(6, [[0, 1, 2], [3, 4, 5], [2, 3]])
    p = Partition.initialize(hg, [0, 0, 1, 0, 1, 1], 2, epsilon=0.34)
    FMRefiner(p).refine(list(range(6)))
    assert p.cut == 1.0
    p.check_consistency()


@pytest.mark.parametrize("k", [2, 3, 4, 8])
def test_pass_oracles_random(k):
    rng = np.random.default_rng(k)
    for trial in range(12):
        n = int(rng.integers(max(k, 8), 60))
        hg = random_hypergraph(rng, n, int(rng.integers(n // 2, 2 * n)), weighted=bool(trial % 2))
        eps = [0.03, 0.2, 1.0][trial % 3]
        p = Partition.initialize(hg, random_assignment(rng, n, k), k, eps)
        c_stop = int(rng.integers(1, 30))
        fm = FMRefiner(p, seed=trial, c_stop=c_stop)
        seeds = rng.choice(n, size=min(n, 4), replace=False)
        states, kept = run_checked_pass(hg, p, fm, seeds, c_stop)
        keys = [(o, c) for o, c, _ in states]
        best = keys.index(min(keys))
        assert kept == best
        assert p.assignment.tolist() == states[best][2].tolist()
        p.check_consistency()
        start_over, start_cut, _ = states[0]
        if start_over == 0:
            assert p.cut <= start_cut and p.is_balanced()
        assert overload(p) <= start_over


@given(hypergraphs(max_n=30, max_m=40), st.sampled_from([2, 3, 4]), st.integers(0, 2**31), st.data())
def test_pass_oracles_property(hg, k, seed, data):
    n = hg.num_vertices
    if n < k:
        return
    rng = np.random.default_rng(seed)
    p = Partition.initialize(hg, random_assignment(rng, n, k), k, data.draw(st.sampled_from([0.03, 0.5])))
    fm = FMRefiner(p, seed=seed, c_stop=20)
    states, kept = run_checked_pass(hg, p, fm, data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=4)), 20)
    keys = [(o, c) for o, c, _ in states]
    assert kept == keys.index(min(keys))
    p.check_consistency()


def test_blocks_never_empty():
    rng = np.random.default_rng(11)
    for _ in range(20):
        hg = random_hypergraph(rng, 12, 30, weighted=False)
        p = Partition.initialize(hg, random_assignment(rng, 12, 6), 6, epsilon=10.0)
        fm = FMRefiner(p, seed=1, c_stop=100)
        fm.begin(range(12))
        while fm.step() is not None:
            assert (p.block_sizes > 0).all()
        fm.end()
        assert (p.block_sizes > 0).all()
