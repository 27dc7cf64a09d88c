"""Four-matching preemptive engine and its structural checkers."""

from fractions import Fraction

import pytest

from matchkit.backend import AUGMENT_ADD, SWITCH_OUT
from matchkit.errors import InvariantError
from matchkit.generators import GenSpec, generate
from matchkit.graphcore import ArrivalSequence
from matchkit.preemptive_mcm import (
    PreemptiveMCM,
    check_lemma_internal,
    check_m4bad,
    classify_edges,
)

BRIDGE = [("a", "b"), ("c", "d"), ("b", "c")]
PATH4 = [(0, 1), (1, 2), (2, 3)]


def test_bridge_trace_exact():
    # Hand-checked: the middle edge displaces both disjoint edges in M_2 and
    # M_3 (two conflicts there beat the one spent), while M_1 and M_4 keep
    # the disjoint pair.
    d = PreemptiveMCM.run(ArrivalSequence.from_pairs(BRIDGE, tree=True))
    assert d.sizes == [2, 1, 1, 2]
    assert d.expected_size() == Fraction(3, 2)
    assert [sorted(d.core.members(i)) for i in range(4)] == [[0, 1], [2], [2], [0, 1]]
    assert [d.core.coverage(e) for e in range(3)] == [4, 4, 4]


def test_path4_in_order_trace_exact():
    d = PreemptiveMCM.run(ArrivalSequence.from_pairs(PATH4, tree=True, growing=True))
    assert d.sizes == [2, 1, 1, 2]
    assert d.expected_size() == Fraction(3, 2)
    assert [sorted(d.core.members(i)) for i in range(4)] == [[0, 2], [1], [1], [0, 2]]


def test_first_matching_never_switches():
    for seed in range(5):
        seq = generate(GenSpec(kind="growing_tree", n=40, seed=seed, params={}))
        d = PreemptiveMCM.run(seq)
        for _eid, i, action, _step in d.core.events:
            if i == 0:
                assert action == AUGMENT_ADD


def test_first_matching_stays_maximal():
    # Only M_1 is guaranteed maximal: evictions are permanent in this model,
    # so a switching matching can leave both endpoints of an old edge free.
    for seed in range(5):
        for kind in ("growing_tree", "tree_any_order"):
            seq = generate(GenSpec(kind=kind, n=60, seed=seed, params={}))
            d = PreemptiveMCM.run(seq)
            assert d.core.maximality_deficit(0) == 0


def test_sampled_size_matches_one_of_the_four():
    seq = generate(GenSpec(kind="growing_tree", n=25, seed=2, params={}))
    d = PreemptiveMCM.run(seq)
    draws = [d.sampled_size(s) for s in range(40)]
    assert all(size == d.sizes[idx] for idx, size in draws)
    # 40 seeds over a uniform choice of four indexes hits every index.
    assert {idx for idx, _ in draws} == {0, 1, 2, 3}


def test_classifier_partitions_and_requires_coverage():
    d = PreemptiveMCM.run(generate(GenSpec(kind="growing_tree", n=12, seed=1, params={})))
    classes = classify_edges(d.core)
    assert all(c.is_internal != c.is_leaf_edge for c in classes)
    assert sum(c.is_bad for c in classes) == 1  # frozen for this seed
    assert all(d.core.coverage(c.eid) >= 3 for c in classes)


def test_structural_checks_on_bad_edge_instances():
    # Seeds 1 and 11 produce final states with one and two bad edges; the
    # bad-incident runs stay within five vertices and the support-only
    # restrictions hold on both.
    for seed, nbad in ((1, 1), (11, 2)):
        d = PreemptiveMCM.run(generate(GenSpec(kind="growing_tree", n=12, seed=seed, params={})))
        classes = classify_edges(d.core)
        assert sum(c.is_bad for c in classes) == nbad
        rep = check_lemma_internal(d.core, classes)
        assert rep.ok and rep.max_run <= 5 and rep.witness == []
        m4 = check_m4bad(d.core, classes)
        assert m4.ok and m4.endpoint_violations == [] and m4.switch_violations == []


def test_switch_events_come_in_pairs():
    # Every switch-out is immediately justified by an add in the same
    # matching during the same arrival step.
    seq = generate(GenSpec(kind="tree_any_order", n=50, seed=9, params={}))
    d = PreemptiveMCM.run(seq)
    by_step = {}
    for eid, i, action, step in d.core.events:
        by_step.setdefault((step, i), []).append(action)
    for actions in by_step.values():
        if SWITCH_OUT in actions:
            assert any(a != SWITCH_OUT for a in actions)


def test_empty_and_single_edge_streams():
    d = PreemptiveMCM.run(ArrivalSequence([], tree=True))
    assert d.expected_size() == 0
    d = PreemptiveMCM.run(ArrivalSequence([(0, 1)], tree=True))
    assert d.sizes == [1, 1, 1, 1]
    assert d.expected_size() == 1


def test_rejects_self_loop_at_engine_level():
    d = PreemptiveMCM()
    with pytest.raises(InvariantError):
        d.process_edge(3, 3)
