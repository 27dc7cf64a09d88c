"""Compiled and pure kernels must be indistinguishable, state and output."""

import os
import subprocess
import sys

import pytest

import matchkit._mmcore_py as pure
from matchkit import backend
from matchkit.generators import GenSpec, generate

compiled = pytest.importorskip(
    "matchkit._mmcore", reason="compiled kernel not built in this environment"
)

STREAMS = [
    GenSpec(kind="growing_tree", n=120, seed=1, params={}),
    GenSpec(kind="tree_any_order", n=120, seed=2, params={}),
    GenSpec(kind="bounded_degree", n=80, seed=3, params={}),
]


def drive(mod, method, seq, k, eps=(0, 1)):
    core = mod.MultiMatchingCore(k, eps_num=eps[0], eps_den=eps[1])
    fn = getattr(core, method)
    for e in seq.edges:
        fn(e.u, e.v)
    return core


@pytest.mark.parametrize("spec", STREAMS, ids=lambda s: s.instance_id)
@pytest.mark.parametrize(
    "method,k,eps",
    [
        ("process_preemptive4", 4, (0, 1)),
        ("process_incremental3", 3, (0, 1)),
        ("process_incremental_det", 4, (1, 4)),  # M_1..M_3 + support
    ],
)
def test_engine_states_match(spec, method, k, eps):
    seq = generate(spec)
    a = drive(compiled, method, seq, k, eps)
    b = drive(pure, method, seq, k, eps)
    assert a.state_digest() == b.state_digest()
    assert a.sizes == b.sizes
    assert list(a.mask) == list(b.mask)
    assert a.events == b.events
    assert (a.work_max, a.work_total) == (b.work_max, b.work_total)
    assert [a.members(i) for i in range(k)] == [b.members(i) for i in range(k)]


def test_forest_dp_outputs_match():
    seq = generate(GenSpec(kind="tree_any_order", n=300, seed=9, params={}))
    n, us, vs, _ = seq.arrays()
    assert compiled.forest_opt(n, us, vs, None) == pure.forest_opt(n, us, vs, None)
    assert compiled.forest_opt_prefix(n, us, vs, None) == pure.forest_opt_prefix(n, us, vs, None)
    wseq = generate(GenSpec(kind="tree_any_order", n=300, seed=9, params={"weighted": True}))
    n, us, vs, ws = wseq.arrays()
    assert compiled.forest_opt(n, us, vs, ws) == pure.forest_opt(n, us, vs, ws)


def test_certificate_scans_match():
    seq = generate(GenSpec(kind="growing_tree", n=200, seed=4, params={}))
    core_c = drive(compiled, "process_incremental3", seq, 3)
    core_p = drive(pure, "process_incremental3", seq, 3)
    n, us, vs, _ = seq.arrays()
    tcnt = [((m >> 0) & 1) + ((m >> 1) & 1) + ((m >> 2) & 1) for m in core_c.mask]
    assert tcnt == [((m >> 0) & 1) + ((m >> 1) & 1) + ((m >> 2) & 1) for m in core_p.mask]
    for root in (0, 7, 50):
        assert compiled.tree_cert_scan_root(n, us, vs, tcnt, root) == pure.tree_cert_scan_root(
            n, us, vs, tcnt, root
        )
    assert compiled.tree_cert_scan_all_roots(n, us, vs, tcnt) == pure.tree_cert_scan_all_roots(
        n, us, vs, tcnt
    )


def test_action_constants_agree():
    for name in ("AUGMENT_ADD", "SWITCH_IN", "SWITCH_OUT", "SUPPORT_ADD", "READD"):
        assert getattr(compiled, name) == getattr(pure, name)


def test_backend_selection_env_override():
    assert backend.BACKEND == "c"
    env = dict(os.environ, MATCHKIT_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from matchkit import backend; print(backend.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"
