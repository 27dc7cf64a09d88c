"""Instance generators: determinism, shapes, guards, adversary recurrences."""

import pytest

from matchkit import oracle
from matchkit.errors import InputError
from matchkit.generators import GENERATORS, GenSpec, SplitMix64, generate
from matchkit.generators import _verify_recurrence
from matchkit.preemptive_mwm import ThresholdMWM, TwoThresholdMWM


def edges_of(seq):
    return [(e.u, e.v, e.w) for e in seq.edges]


def test_same_spec_same_stream():
    for kind in GENERATORS:
        a = generate(GenSpec(kind=kind, n=12, seed=7, params={}))
        b = generate(GenSpec(kind=kind, n=12, seed=7, params={}))
        c = generate(GenSpec(kind=kind, n=12, seed=8, params={}))
        assert edges_of(a) == edges_of(b)
        if kind not in ("path", "star", "mcgregor_adversary", "alg4_tight"):
            assert edges_of(a) != edges_of(c)  # seed reaches the structure


def test_instance_ids_encode_the_recipe():
    assert GenSpec(kind="growing_tree", n=10, seed=3).instance_id == "growing_tree-n10-s3"
    spec = GenSpec(kind="mcgregor_adversary", n=5, seed=0, params={"gamma": 0.5})
    assert spec.instance_id == "mcgregor_adversary-n5-s0-gamma0.5"
    assert edges_of(spec.build()) == edges_of(generate(spec))


def test_shapes_and_flags():
    path = generate(GenSpec(kind="path", n=5))
    assert [(e.u, e.v) for e in path.edges] == [(i, i + 1) for i in range(5)]
    assert path.tree and path.growing
    star = generate(GenSpec(kind="star", n=5))
    assert all(e.u == 0 for e in star.edges)
    gt = generate(GenSpec(kind="growing_tree", n=40, seed=2))
    assert gt.tree and gt.growing and len(gt.edges) == 40
    ta = generate(GenSpec(kind="tree_any_order", n=40, seed=2))
    assert ta.tree and not ta.growing and oracle._is_forest(ta)


def test_bounded_degree_respects_the_cap():
    for seed in range(5):
        seq = generate(GenSpec(kind="bounded_degree", n=30, seed=seed))
        assert seq.maxdeg == 3
        deg = {}
        for e in seq.edges:
            deg[e.u] = deg.get(e.u, 0) + 1
            deg[e.v] = deg.get(e.v, 0) + 1
        assert max(deg.values()) <= 3
    wide = generate(GenSpec(kind="bounded_degree", n=30, seed=0, params={"maxdeg": 2}))
    assert wide.maxdeg == 2


def test_weighted_param_switches_mode():
    seq = generate(GenSpec(kind="growing_tree", n=20, seed=1, params={"weighted": True}))
    assert seq.mode == "mwm"
    assert all(0.0 < e.w < 1.0 for e in seq.edges)
    plain = generate(GenSpec(kind="growing_tree", n=20, seed=1))
    assert plain.mode == "mcm" and all(e.w == 1.0 for e in plain.edges)
    # Same seed, same shape: weights must not perturb the structure draw.
    assert [(e.u, e.v) for e in seq.edges] == [(e.u, e.v) for e in plain.edges]


def test_input_guards():
    with pytest.raises(InputError, match="known:"):
        generate(GenSpec(kind="moebius", n=3))
    for kind in ("path", "star", "growing_tree", "tree_any_order"):
        with pytest.raises(InputError):
            generate(GenSpec(kind=kind, n=0))
    with pytest.raises(InputError):
        generate(GenSpec(kind="bounded_degree", n=1))
    with pytest.raises(InputError):
        generate(GenSpec(kind="mcgregor_adversary", n=5, params={"gamma": 0.0}))
    with pytest.raises(InputError):
        generate(GenSpec(kind="alg4_tight", n=5, params={"delta": 1.5}))


def test_growth_cap_blocks_weight_overflow():
    with pytest.raises(InputError, match="2\\^52"):
        generate(GenSpec(kind="mcgregor_adversary", n=60, params={"gamma": 1.0}))
    with pytest.raises(InputError, match="2\\^52"):
        generate(GenSpec(kind="alg4_tight", n=60))


def test_recurrence_checker_rejects_corruption():
    seq = generate(GenSpec(kind="alg4_tight", n=6))
    weights = [e.w for e in seq.edges]
    _verify_recurrence(weights, 6, 1.0, 2.0, 1.0, 1e-6)  # the genuine stream passes
    bad = list(weights)
    bad[3] *= 1.0 + 1e-9
    with pytest.raises(InputError, match="recurrence"):
        _verify_recurrence(bad, 6, 1.0, 2.0, 1.0, 1e-6)


def test_alg4_tight_drives_the_two_matching_engine():
    seq = generate(GenSpec(kind="alg4_tight", n=10))
    assert seq.growing and seq.mode == "mwm"
    a = TwoThresholdMWM.run(seq, 1 / 3, 0, 1)
    last = a.rounds[-1]
    assert not last.in_m1 and not last.in_m2  # the closing tie is rejected
    assert a.growth_flags == 0


def test_mcgregor_adversary_forces_evictions():
    seq = generate(GenSpec(kind="mcgregor_adversary", n=10, params={"gamma": 2 ** -0.5}))
    t = ThresholdMWM.run(seq, 2 ** -0.5)
    # Every chain edge evicts its predecessor; the matching ends with one edge.
    assert len(t.m.members) == 1
    opt = oracle.opt_matching(seq).value
    assert opt / t.matched_weight() > 5.0


def test_splitmix_is_stable():
    a = SplitMix64(42)
    b = SplitMix64(42)
    assert [a.randrange(1000) for _ in range(8)] == [b.randrange(1000) for _ in range(8)]
    assert SplitMix64(42).randrange(1000) != SplitMix64(43).randrange(1000)
    assert 0.0 <= SplitMix64(1).uniform01() < 1.0
