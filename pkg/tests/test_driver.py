import numpy as np
import pytest

from conftest import random_hypergraph
from oracles import cut as oracle_cut
from hyperpart import PRESETS, InitialPartitionError, Partition, partition, vcycle
from hyperpart.generators import netlist, two_halves


def test_preset_values():
    assert {name: (p.refiner, p.vcycles) for name, p in PRESETS.items()} == {
        "fast": ("sclap", 0),
        "strong": ("fm", 0),
        "fastv": ("sclap", 3),
        "strongv": ("fm", 10),
    }
    for p in PRESETS.values():
        assert (p.variant, p.c_stop, p.rounds, p.s, p.t_factor, p.initial_trials) == ("lazy", 200, 5, 2.5, 160, 1)


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_h0_optimum(h0, preset):
    for seed in range(5):
        res = partition(h0, 2, 0.03, preset, seed=seed)
        assert res.cut == 1.0 and res.balanced
    assert h0.depth == 0 and h0.current_num_vertices == 4


def test_two_halves():
    hg = two_halves(300, 400, seed=1)
    for preset in ("fast", "strong"):
        assert partition(hg, 2, 0.03, preset, seed=0).cut == 0.0


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_determinism(preset):
    hg = netlist(1500, seed=4)
    a = partition(hg, 4, 0.03, preset, seed=9)
    b = partition(hg, 4, 0.03, preset, seed=9)
    assert np.array_equal(a.assignment, b.assignment)
    assert a.cut == b.cut and a.stats == b.stats and a.vcycle_trace == b.vcycle_trace


@pytest.mark.parametrize("preset", sorted(PRESETS))
@pytest.mark.parametrize("k", [2, 3, 4, 8])
def test_result_invariants(preset, k):
    rng = np.random.default_rng(k)
    hg = random_hypergraph(rng, 400, 500, weighted=False)
    before = hg.snapshot()
    res = partition(hg, k, 0.03, preset, seed=k)
    assert hg.snapshot() == before
    assert res.cut == oracle_cut(hg, res.assignment)
    assert res.partition.hg.depth == 0
    res.partition.check_consistency()
    bw = np.bincount(res.assignment, minlength=k)
    assert (bw > 0).all() and bw.sum() == 400
    if res.initial_balanced:
        assert res.balanced
    trace = res.vcycle_trace
    assert len(trace) <= PRESETS[preset].vcycles + 1
    assert all(x >= y for x, y in zip(trace, trace[1:]))
    # only the last cycle may fail to improve
    assert all(x > y for x, y in zip(trace[:-1], trace[1:-1]))
    assert set(res.timings) == {"coarsen", "initial", "uncoarsen", "vcycles", "total"}


def test_vcycle_without_same_block_pairs(h0):
    p = Partition.initialize(h0, [0, 1, 2, 3], 4, epsilon=0.03)
    assert vcycle(p, "strong", seed=0) == 3.0
    assert h0.depth == 0


def test_vcycles_non_increasing():
    hg = netlist(1200, seed=8)
    res = partition(hg, 2, 0.03, "strong", seed=1)
    p = res.partition
    cuts = [p.cut]
    for i in range(10):
        cuts.append(vcycle(p, "strong", seed=1, index=i))
        assert p.cut == oracle_cut(p.hg, p.assignment)
        assert p.is_balanced()
    assert all(x >= y for x, y in zip(cuts, cuts[1:]))


def test_argument_errors(h0):
    with pytest.raises(ValueError):
        partition(h0, 1)
    with pytest.raises(ValueError):
        partition(h0, 2, epsilon=0.0)
    with pytest.raises(InitialPartitionError):
        partition(h0, 5)
    with pytest.raises(KeyError):
        partition(h0, 2, preset="medium")


def test_variant_override():
    hg = netlist(800, seed=3)
    for variant in ("full", "partial", "lazy"):
        res = partition(hg, 2, 0.03, "fast", seed=0, variant=variant)
        assert res.balanced and res.cut == oracle_cut(hg, res.assignment)
