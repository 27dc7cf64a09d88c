"""Compare the compiled kernels against the pure-Python reference.

Runs the same workloads through both backends and prints a small table of
wall-clock times plus the speedup.  Digest equality is asserted on every
engine workload, so this doubles as a coarse parity check.

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

from matchkit import _mmcore_py as pure
from matchkit.backend import BACKEND
from matchkit.generators import GenSpec, generate

try:
    from matchkit import _mmcore as compiled
except ImportError:
    compiled = None


def _stream(kind, n, seed, weighted=False):
    seq = generate(GenSpec(kind=kind, n=n, seed=seed, params={"weighted": True} if weighted else {}))
    us = [e.u for e in seq.edges]
    vs = [e.v for e in seq.edges]
    ws = [e.w for e in seq.edges]
    return seq.n_vertices, us, vs, ws


def _drive(mod, method, us, vs, eps=(1, 4)):
    if method == "process_incremental_det":
        core = mod.MultiMatchingCore(4, eps[0], eps[1])  # M_1..M_3 + support
    else:
        core = mod.MultiMatchingCore(4 if method == "process_preemptive4" else 3)
    fn = getattr(core, method)
    for e in range(len(us)):
        fn(us[e], vs[e])
    return core


def bench_engines(results, quick):
    n = 20000 if quick else 100000
    for method, label, kind in (
        ("process_preemptive4", "alg1 tree stream", "growing_tree"),
        ("process_incremental3", "alg2 tree stream", "growing_tree"),
        ("process_incremental_det", "alg3 tree stream", "growing_tree"),
    ):
        nv, us, vs, _ = _stream(kind, n, 42)
        t0 = time.perf_counter()
        cpure = _drive(pure, method, us, vs)
        t_pure = time.perf_counter() - t0
        if compiled is None:
            results.append((label, n, t_pure, None))
            continue
        t0 = time.perf_counter()
        ccomp = _drive(compiled, method, us, vs)
        t_comp = time.perf_counter() - t0
        assert cpure.state_digest() == ccomp.state_digest(), "backend digests diverge"
        results.append((label, n, t_pure, t_comp))


def bench_forest_dp(results, quick):
    n = 20000 if quick else 200000
    nv, us, vs, ws = _stream("tree_any_order", n, 7, weighted=True)
    t0 = time.perf_counter()
    vpure = pure.forest_opt(nv, us, vs, ws)
    t_pure = time.perf_counter() - t0
    if compiled is None:
        results.append(("forest DP (weighted)", n, t_pure, None))
    else:
        t0 = time.perf_counter()
        vcomp = compiled.forest_opt(nv, us, vs, ws)
        t_comp = time.perf_counter() - t0
        assert abs(vpure[0] - vcomp[0]) < 1e-6 and sorted(vpure[1]) == sorted(vcomp[1])
        results.append(("forest DP (weighted)", n, t_pure, t_comp))

    n = 2000 if quick else 5000
    nv, us, vs, _ = _stream("growing_tree", n, 7)
    t0 = time.perf_counter()
    ppure = pure.forest_opt_prefix(nv, us, vs, None)
    t_pure = time.perf_counter() - t0
    if compiled is None:
        results.append(("forest DP prefixes", n, t_pure, None))
    else:
        t0 = time.perf_counter()
        pcomp = compiled.forest_opt_prefix(nv, us, vs, None)
        t_comp = time.perf_counter() - t0
        assert list(ppure) == list(pcomp)
        results.append(("forest DP prefixes", n, t_pure, t_comp))


def bench_cert_scan(results, quick):
    n = 2000 if quick else 20000
    nv, us, vs, _ = _stream("growing_tree", n, 13)
    core = _drive(pure, "process_incremental3", us, vs)
    mask = core.mask
    tcnt = [((m >> 0) & 1) + ((m >> 1) & 1) + ((m >> 2) & 1) for m in mask]
    t0 = time.perf_counter()
    rpure = pure.tree_cert_scan_all_roots(nv, us, vs, tcnt)
    t_pure = time.perf_counter() - t0
    if compiled is None:
        results.append(("cert scan, all roots", n, t_pure, None))
    else:
        t0 = time.perf_counter()
        rcomp = compiled.tree_cert_scan_all_roots(nv, us, vs, tcnt)
        t_comp = time.perf_counter() - t0
        assert rpure == rcomp
        results.append(("cert scan, all roots", n, t_pure, t_comp))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args()

    print("active backend: %s" % BACKEND)
    if compiled is None:
        print("compiled kernels unavailable; timing pure Python only")
    results = []
    bench_engines(results, args.quick)
    bench_forest_dp(results, args.quick)
    bench_cert_scan(results, args.quick)

    width = max(len(r[0]) for r in results)
    print("%-*s %10s %10s %10s %8s" % (width, "workload", "size", "pure [s]", "comp [s]", "speedup"))
    for label, n, t_pure, t_comp in results:
        if t_comp is None:
            print("%-*s %10d %10.3f %10s %8s" % (width, label, n, t_pure, "-", "-"))
        else:
            print("%-*s %10d %10.3f %10.3f %7.1fx" % (width, label, n, t_pure, t_comp, t_pure / t_comp))


if __name__ == "__main__":
    main()
