import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import hypergraphs
from oracles import cut as oracle_cut
from hyperpart import Hypergraph, Partition, PartitionError
from hyperpart.partition import imbalance


def test_initialize_h0(h0):
    p = Partition.initialize(h0, [0, 0, 1, 1], 2, 0.03)
    assert p.cut == 1.0
    assert p.max_block_weight == pytest.approx(2.06)
    assert p.connectivity_set(1) == [0, 1]
    assert p.phi(1, 0) == 2 and p.phi(1, 1) == 1
    assert Partition.initialize(h0, [0, 1, 0, 1], 2).cut == 3.0
    p.check_consistency()


def test_initialize_errors(h0):
    with pytest.raises(PartitionError):
        Partition.initialize(h0, [0, 0, 0, 0], 2)
    with pytest.raises(PartitionError):
        Partition.initialize(h0, [0, 0, 1, 2], 2)
    with pytest.raises(PartitionError):
        Partition.initialize(h0, [0, 0, 1], 2)
    with pytest.raises(PartitionError):
        Partition.initialize(h0, [0, -1, 1, 1], 2)


def test_move_examples(h0):
    p = Partition.initialize(h0, [0, 0, 1, 1], 2)
    d = p.move_vertex(2, 0)
    assert d.cut_delta == 0.0 and p.cut == 1.0
    d2 = p.move_vertex(2, 1)
    assert d.cut_delta + d2.cut_delta == 0.0
    d = p.move_vertex(0, 1)
    assert d.cut_delta == 1.0 and p.cut == 2.0
    with pytest.raises(PartitionError):
        p.move_vertex(0, 1)


def test_move_and_inverse_restore_everything(h0):
    p = Partition.initialize(h0, [0, 0, 1, 1], 2)
    before = p.copy()
    p.move_vertex(1, 1)
    p.move_vertex(1, 0)
    assert np.array_equal(before.assignment, p.assignment)
    assert np.array_equal(before.block_weights, p.block_weights)
    assert before.cut == p.cut
    for e in range(h0.num_nets):
        assert before.connectivity_set(e) == p.connectivity_set(e)
        assert [before.phi(e, i) for i in range(2)] == [p.phi(e, i) for i in range(2)]


def test_border(h0):
    p = Partition.initialize(h0, [0, 0, 1, 1], 2)
    assert not p.is_border(3)
    assert p.is_border(2)
    hg = Hypergraph.build(3, [[0], [1, 2]])
    q = Partition.initialize(hg, [0, 1, 1], 2)
    assert not q.is_border(0)


def test_imbalance_formula():
    assert imbalance(np.array([2.0, 2.0]), 4.0, 2) == 0.0
    assert imbalance(np.array([3.0, 1.0]), 4.0, 2) == 0.5
    assert imbalance(np.array([4.12, 3.88]), 8.0, 2) == pytest.approx(0.03)


def test_balance_boundary():
    hg = Hypergraph.build(200, [], vertex_weights=np.ones(200))
    a = np.array([0] * 103 + [1] * 97)
    assert Partition.initialize(hg, a, 2, 0.03).is_balanced()
    a = np.array([0] * 104 + [1] * 96)
    assert not Partition.initialize(hg, a, 2, 0.03).is_balanced()


@given(hypergraphs(), st.integers(2, 5), st.data())
def test_incremental_tables_match_rebuild(hg, k, data):
    n = hg.num_vertices
    k = min(k, n)
    assignment = data.draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    p = Partition.initialize(hg, assignment, k, allow_empty=True)
    p.check_consistency()
    for _ in range(data.draw(st.integers(1, 30))):
        v = data.draw(st.integers(0, n - 1))
        to = data.draw(st.integers(0, k - 1))
        if to == p.block(v):
            continue
        before = p.cut
        d = p.move_vertex(v, to)
        assert p.cut == oracle_cut(hg, p.p.part)
        assert d.cut_delta == p.cut - before
    p.check_consistency()
    fresh = Partition.initialize(hg, p.assignment, k, allow_empty=True)
    assert fresh.cut == p.cut
    for e in hg.enabled_nets():
        assert fresh.connectivity_set(e) == p.connectivity_set(e)
        for i in range(k):
            assert fresh.phi(e, i) == p.phi(e, i)


@given(hypergraphs(), st.data())
def test_balance_predicate(hg, data):
    n = hg.num_vertices
    assignment = [i % 2 for i in range(n)]
    p = Partition.initialize(hg, assignment, 2, data.draw(st.sampled_from([0.01, 0.03, 0.5])))
    assert p.is_balanced() == bool((p.block_weights <= p.max_block_weight).all())
