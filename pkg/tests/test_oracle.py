"""Optimum-matching oracles: forest DP vs branch-and-bound, prefixes, caps."""

import pytest

from matchkit import oracle
from matchkit.errors import CyclicGraphError, OracleCapError
from matchkit.generators import GenSpec, SplitMix64, generate
from matchkit.graphcore import ArrivalSequence

BRIDGE = ArrivalSequence.from_pairs([("a", "b"), ("c", "d"), ("b", "c")], tree=True)
TRIANGLE = ArrivalSequence.from_pairs([(0, 1), (1, 2), (0, 2)])


def test_small_frozen_optima():
    assert oracle.opt_matching(BRIDGE).value == 2
    assert oracle.opt_matching(BRIDGE).witness == [0, 1]
    assert oracle.opt_matching(TRIANGLE).value == 1


def test_witness_is_a_valid_optimum_matching():
    for seed in (0, 1, 2):
        seq = generate(GenSpec(kind="tree_any_order", n=25, seed=seed, params={}))
        r = oracle.opt_matching(seq)
        m = r.as_matching(seq)  # Matching.add raises on any conflict
        assert len(m.members) == r.value


def test_forest_dp_matches_branch_and_bound():
    rng = SplitMix64(99)
    for seed in range(25):
        n = 4 + rng.randrange(14)
        kind = "growing_tree" if seed % 2 else "tree_any_order"
        seq = generate(GenSpec(kind=kind, n=n, seed=seed, params={}))
        assert oracle.opt_matching_forest(seq).value == oracle.opt_matching_exact(seq).value


def test_forest_dp_matches_branch_and_bound_weighted():
    seq = generate(GenSpec(kind="growing_tree", n=12, seed=3, params={"weighted": True}))
    fr = oracle.opt_matching_forest(seq)
    ex = oracle.opt_matching_exact(seq)
    assert fr.value == ex.value == 3.9031725657846676


def test_prefix_values_recompute_and_stay_monotone():
    seq = generate(GenSpec(kind="tree_any_order", n=30, seed=7, params={}))
    pre = oracle.opt_matching_forest_prefixes(seq)
    assert len(pre) == len(seq.edges)
    assert all(pre[i] <= pre[i + 1] for i in range(len(pre) - 1))
    for t in (0, 5, len(seq.edges) - 1):
        head = ArrivalSequence(seq.edges[: t + 1], mode=seq.mode)
        assert pre[t] == oracle.opt_matching_forest(head).value


def test_prefixes_fall_back_to_exact_off_forests():
    cyc = generate(GenSpec(kind="bounded_degree", n=12, seed=4, params={}))
    assert not oracle._is_forest(cyc)
    assert oracle.opt_matching_prefixes(cyc) == [
        1, 2, 2, 3, 4, 4, 4, 4, 4, 4, 5, 5, 5, 6, 6, 6, 6, 6,
    ]
    tree = generate(GenSpec(kind="growing_tree", n=15, seed=0, params={}))
    assert oracle.opt_matching_prefixes(tree) == oracle.opt_matching_forest_prefixes(tree)


def test_cycles_are_rejected_by_the_forest_routes():
    with pytest.raises(CyclicGraphError):
        oracle.opt_matching_forest(TRIANGLE)
    with pytest.raises(CyclicGraphError):
        oracle.opt_matching(TRIANGLE, method="forest")
    with pytest.raises(CyclicGraphError):
        oracle.opt_matching_forest_prefixes(TRIANGLE)


def test_exact_cap_guards_blowup():
    cyc = generate(GenSpec(kind="bounded_degree", n=30, seed=0, params={}))
    assert len(cyc.edges) > 10
    with pytest.raises(OracleCapError):
        oracle.opt_matching_exact(cyc, cap=10)
    with pytest.raises(OracleCapError):
        oracle.opt_matching_prefixes(cyc, cap=10)
    # The cap never applies to forests: the DP is polynomial.
    big = generate(GenSpec(kind="growing_tree", n=200, seed=0, params={}))
    assert oracle.opt_matching(big, cap=10).value == oracle.opt_matching_forest(big).value


def test_dispatch_method_names():
    assert oracle.opt_matching(BRIDGE, method="exact").value == 2
    with pytest.raises(ValueError):
        oracle.opt_matching(BRIDGE, method="grail")
