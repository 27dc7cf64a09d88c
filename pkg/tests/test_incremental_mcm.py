"""Three-matching incremental engines: randomized and deterministic."""

from fractions import Fraction

import pytest

from matchkit import oracle
from matchkit.backend import READD, SUPPORT_ADD
from matchkit.errors import InputError
from matchkit.generators import GenSpec, generate
from matchkit.graphcore import ArrivalSequence
from matchkit.incremental_mcm import DeterministicIncrementalMCM, IncrementalMCM

BRIDGE = [("a", "b"), ("c", "d"), ("b", "c")]
PATH4 = [(0, 1), (1, 2), (2, 3)]
# growing_tree n=10 seed=0; rich enough to exercise re-adds and ChangeCurr.
TREE10 = GenSpec(kind="growing_tree", n=10, seed=0, params={})


def test_bridge_trace_exact():
    d = IncrementalMCM.run(ArrivalSequence.from_pairs(BRIDGE, tree=True))
    assert d.sizes == [2, 1, 1]
    assert d.expected_size() == Fraction(4, 3)
    assert [sorted(d.core.members(i)) for i in range(3)] == [[0, 1], [2], [2]]
    assert (d.work_total, d.work_max) == (81, 53)


def test_path4_in_order_trace_exact():
    d = IncrementalMCM.run(ArrivalSequence.from_pairs(PATH4, tree=True, growing=True))
    assert d.sizes == [2, 1, 2]
    assert d.expected_size() == Fraction(5, 3)
    assert [sorted(d.core.members(i)) for i in range(3)] == [[0, 2], [1], [0, 2]]


def test_tree10_state_and_work_frozen():
    d = IncrementalMCM.run(generate(TREE10))
    assert d.sizes == [3, 3, 4]
    assert d.expected_size() == Fraction(10, 3)
    assert (d.work_total, d.work_max) == (204, 31)
    assert any(a == READD for _e, _i, a, _s in d.core.events)


def test_all_three_matchings_stay_maximal_on_trees():
    # Unlike the preemptive engine, discarded edges may rejoin here, and on
    # trees the re-add step repairs every hole a switch opens.  General graphs
    # do not get this guarantee: both re-add candidates at the freed vertex can
    # conflict, leaving a genuine deficit (see bounded_degree n=50 seed=0).
    for seed in range(8):
        for kind in ("growing_tree", "tree_any_order"):
            seq = generate(GenSpec(kind=kind, n=50, seed=seed, params={}))
            d = IncrementalMCM.run(seq)
            assert [d.core.maximality_deficit(i) for i in range(3)] == [0, 0, 0]


# Smallest known final state below the 2/3-of-optimum expectation floor: a
# 14-edge growing tree ending at sizes [3, 4, 4] against optimum 6, so
# E = 11/3 < 4.  All three matchings are maximal there, and the state was
# confirmed edge-for-edge by an independent re-simulation of the update
# rules, so it pins real engine behavior, not a defect.
TREE14_BELOW_FLOOR = [
    (0, 1), (0, 2), (2, 3), (1, 4), (0, 5), (5, 6), (0, 7),
    (2, 8), (5, 9), (0, 10), (6, 11), (0, 12), (0, 13), (3, 14),
]


def test_known_final_state_below_two_thirds_floor():
    seq = ArrivalSequence.from_pairs(TREE14_BELOW_FLOOR, tree=True, growing=True)
    d = IncrementalMCM.run(seq)
    assert d.sizes == [3, 4, 4]
    assert [d.core.maximality_deficit(i) for i in range(3)] == [0, 0, 0]
    assert oracle.opt_matching_forest(seq).value == 6
    assert d.expected_size() == Fraction(11, 3)
    assert d.expected_size() < Fraction(2, 3) * 6


def test_sampled_size_is_a_member_size():
    d = IncrementalMCM.run(generate(TREE10))
    draws = [d.sampled_size(s) for s in range(30)]
    assert all(size == d.sizes[idx] for idx, size in draws)
    assert {idx for idx, _ in draws} == {0, 1, 2}


def test_intersections_match_recount():
    for seed in (0, 3):
        seq = generate(GenSpec(kind="tree_any_order", n=40, seed=seed, params={}))
        d = IncrementalMCM.run(seq)
        inter = d.core.intersections()
        for i in range(3):
            assert inter[i][i] == 0  # diagonal is never tracked
            for j in range(3):
                if i == j:
                    continue
                expect = len(set(d.core.members(i)) & set(d.core.members(j)))
                assert inter[i][j] == expect


def test_det_bridge_support_holds_middle_edge():
    d = DeterministicIncrementalMCM.run(ArrivalSequence.from_pairs(BRIDGE, tree=True), Fraction(1, 4))
    assert d.sizes == [2, 2, 2]
    assert sorted(d.core.members(3)) == [2]
    assert d.current_index == 0 and d.current_size == 2
    assert d.core.work_total == 43


def test_det_path4_trace():
    d = DeterministicIncrementalMCM.run(
        ArrivalSequence.from_pairs(PATH4, tree=True, growing=True), Fraction(1, 4)
    )
    assert d.sizes == [2, 1, 2]
    assert sorted(d.core.members(3)) == []
    assert d.current_index == 0 and d.current_size == 2


def test_det_changecurr_depends_on_eps():
    # Smaller eps means a stricter lag test, so the output index is switched
    # more eagerly; the frozen runs differ only in ChangeCurr activity.
    seq = generate(TREE10)
    got = {}
    for eps in (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)):
        d = DeterministicIncrementalMCM.run(seq, eps)
        assert d.sizes == [3, 3, 4]
        assert sorted(d.core.members(3)) == [5]
        assert d.current_ok()
        got[eps] = (d.current_index, d.changecurr_count, d.work_total)
    assert got[Fraction(1, 8)] == (2, 2, 223)
    assert got[Fraction(1, 4)] == (1, 1, 216)
    assert got[Fraction(1, 2)] == (1, 1, 217)


def test_det_sizes_monotone_and_current_never_lags():
    for seed in range(5):
        seq = generate(GenSpec(kind="growing_tree", n=60, seed=seed, params={}))
        d = DeterministicIncrementalMCM(Fraction(1, 4))
        prev = [0, 0, 0]
        for e in seq.edges:
            d.process_edge(e.u, e.v)
            now = d.sizes
            assert all(a <= b for a, b in zip(prev, now))
            assert d.current_ok()
            prev = now


def test_det_support_add_event_logged():
    seq = generate(GenSpec(kind="tree_any_order", n=10, seed=0, params={}))
    d = DeterministicIncrementalMCM.run(seq, Fraction(1, 4))
    assert any(a == SUPPORT_ADD for _e, _i, a, _s in d.core.events)
    assert d.support_size == 1


def test_det_eps_validation():
    with pytest.raises(InputError):
        DeterministicIncrementalMCM(Fraction(0))
    with pytest.raises(InputError):
        DeterministicIncrementalMCM(Fraction(-1, 4))
    d = DeterministicIncrementalMCM("1/4")
    assert d.eps == Fraction(1, 4)
