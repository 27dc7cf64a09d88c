"""Command-line harness: generate, run, sweep, certify, and query oracles.

Subcommands::

    matchkit gen      --kind ... --n ... --seed ...      write an instance file
    matchkit run      INSTANCE --alg ...                  one algorithm run
    matchkit sweep    --alg ... --kind ... --count ...    parameter grid runs
    matchkit opt      INSTANCE                            exact optimum
    matchkit certify  INSTANCE                            dual certificate dump

Exit codes: 0 success, 2 invariant violation (including a certified bound
observed broken in its analyzed input class), 3 certificate failure,
4 input error.  Reports are bit-identical for identical inputs; sweeps
parallelize across MATCHKIT_THREADS worker processes (default 1) with
deterministic row order regardless of scheduling.
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from matchkit import certify as certmod
from matchkit import oracle, reports
from matchkit.errors import (
    CertificateError,
    InputError,
    InvariantError,
    MatchkitError,
)
from matchkit.generators import GENERATORS, GenSpec
from matchkit.graphcore import format_instance, read_instance
from matchkit.incremental_mcm import DeterministicIncrementalMCM, IncrementalMCM
from matchkit.preemptive_mcm import (
    PreemptiveMCM,
    check_lemma_internal,
    check_m4bad,
    classify_edges,
)
from matchkit.preemptive_mwm import ThresholdMWM, TwoThresholdMWM, theorem5_bound

MCM_ALGS = ("alg1", "alg2", "alg3")
ALGS = MCM_ALGS + ("mwm", "mcgregor")
RATIO_TOL = 1e-9


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _frac(text) -> Fraction:
    """Parse '1/8', '0.125', or '2' into an exact Fraction."""
    return Fraction(text)


def _max_degree(seq) -> int:
    deg = [0] * seq.n_vertices
    for e in seq.edges:
        deg[e.u] += 1
        deg[e.v] += 1
    return max(deg, default=0)


def _instance_info(seq, inst_id, kind=None, seed=None) -> dict:
    flags = []
    if seq.growing:
        flags.append("growing-tree")
    elif seq.tree:
        flags.append("tree")
    if seq.maxdeg is not None:
        flags.append("maxdeg=%d" % seq.maxdeg)
    info = {
        "id": inst_id,
        "n_vertices": seq.n_vertices,
        "m_edges": len(seq.edges),
        "mode": seq.mode,
        "flags": flags,
    }
    if kind is not None:
        info["kind"] = kind
    if seed is not None:
        info["seed"] = seed
    return info


def _frac_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}


def execute_run(
    seq,
    alg: str,
    params: dict,
    info: dict,
    per_step: bool = False,
    do_cert: bool = False,
    scheme: str = "auto",
    lemmas: bool = False,
    sample=None,
    oracle_method: str = "auto",
    skip_opt: bool = False,
    cap: int = oracle.EXACT_EDGE_CAP,
):
    """Run one algorithm over one arrival sequence; returns (report, exit)."""
    if alg in MCM_ALGS and seq.mode != "mcm":
        raise InputError("%s needs an mcm instance" % alg)
    doc = {
        "schema_version": reports.SCHEMA_VERSION,
        "row_type": "run",
        "instance": info,
        "algorithm": {"name": alg, "params": {}},
    }
    exit_code = 0
    if alg in MCM_ALGS:
        doc_alg, exit_code = _run_mcm(
            seq, alg, params, doc, per_step, do_cert, scheme, lemmas, sample,
            oracle_method, skip_opt, cap,
        )
    else:
        doc_alg, exit_code = _run_mwm(
            seq, alg, params, doc, sample, oracle_method, skip_opt, cap
        )
    return doc_alg, exit_code


def _opt_value(seq, oracle_method, cap):
    res = oracle.opt_matching(seq, method=oracle_method, cap=cap)
    return res.value


def _run_mcm(seq, alg, params, doc, per_step, do_cert, scheme, lemmas, sample,
             oracle_method, skip_opt, cap):
    exit_code = 0
    if alg == "alg1":
        driver = PreemptiveMCM()
        k = 4
        process = driver.process_edge
    elif alg == "alg2":
        driver = IncrementalMCM()
        k = 3
        process = driver.process_edge
    else:
        eps = params.get("eps", Fraction(1, 4))
        driver = DeterministicIncrementalMCM(eps)
        k = 3
        process = driver.process_edge
        doc["algorithm"]["params"]["eps"] = str(driver.eps)

    maxdeg = _max_degree(seq)
    in_class = seq.tree or (alg == "alg2" and maxdeg <= 3)
    per_step_sizes = []
    cur_sizes = []
    for e in seq.edges:
        process(e.u, e.v)
        if per_step:
            per_step_sizes.append(sum(driver.sizes))
            if alg == "alg3":
                cur_sizes.append(driver.current_size)

    sizes = driver.sizes
    if alg == "alg3":
        # Deterministic: the designated matching M_cur is the output.
        expectation = Fraction(driver.current_size)
    else:
        expectation = driver.expected_size()
    doc["sizes"] = sizes
    doc["expectation"] = float(expectation)
    doc["expectation_exact"] = _frac_json(expectation)
    doc["events"] = len(driver.core.events)
    doc["in_analyzed_class"] = in_class
    if alg in ("alg2", "alg3"):
        doc["work"] = {
            "max": driver.work_max,
            "total": driver.work_total,
            "amortized": driver.work_total / max(1, len(seq.edges)),
        }
    if alg == "alg3":
        doc["changecurr"] = driver.changecurr_count
        doc["current_index"] = driver.current_index + 1
        doc["current_size"] = driver.current_size
    if sample is not None:
        if alg == "alg3":
            raise InputError("--sample applies to randomized algorithms")
        l, size = driver.sampled_size(sample)
        doc["sampled"] = {"index": l + 1, "size": size}

    opt_val = None
    if not skip_opt:
        opt_val = _opt_value(seq, oracle_method, cap)
        doc["opt"] = opt_val
        ratio = _ratio(opt_val, expectation)
        doc["ratio"] = float(ratio)
        doc["ratio_exact"] = _frac_json(ratio)
        bound = _mcm_bound(alg, seq, maxdeg, driver)
        if bound is not None:
            doc["bound"] = float(bound)
            if in_class and ratio > bound:
                doc["bound_violated"] = True
                exit_code = 2

    if per_step:
        ps, ps_exit = _per_step_mcm(seq, alg, driver, per_step_sizes, cur_sizes, in_class, cap)
        doc["per_step"] = ps
        exit_code = max(exit_code, ps_exit)

    if lemmas:
        if alg != "alg1":
            raise InputError("--lemmas applies to alg1 runs")
        classes = classify_edges(driver.core)
        run_rep = check_lemma_internal(driver.core, classes)
        m4_rep = check_m4bad(driver.core, classes)
        doc["lemmas"] = {
            "bad_run": {"ok": run_rep.ok, "max_run": run_rep.max_run,
                        "witness": run_rep.witness},
            "m4_only": {"ok": m4_rep.ok,
                        "endpoint_violations": m4_rep.endpoint_violations,
                        "switch_violations": m4_rep.switch_violations},
        }
        if not (run_rep.ok and m4_rep.ok):
            exit_code = max(exit_code, 2)

    if do_cert:
        if alg != "alg2":
            raise InputError("--certify applies to alg2 runs")
        # A failed certificate is a result, not an abort: the row keeps the
        # run data, records the failure, and the exit code carries it.
        try:
            cert, all_roots_ok = _build_certificate(driver.core, seq, scheme)
            certified = certmod.weak_duality_ratio(
                cert, expectation, None if opt_val is None else opt_val
            )
        except CertificateError as exc:
            doc["certificate"] = {"feasible": False, "error": str(exc)}
            exit_code = max(exit_code, 3)
        else:
            doc["certificate"] = {
                "scheme": cert.scheme,
                "feasible": cert.feasible,
                "threshold": _frac_json(cert.threshold),
                "total": _frac_json(cert.total),
                "min_slack": _frac_json(cert.min_slack),
                "certified_ratio": float(certified),
                "all_roots_ok": all_roots_ok,
            }
    return doc, exit_code


def _ratio(opt_val, expectation) -> Fraction:
    if expectation == 0:
        if opt_val:
            raise InvariantError("empty output against nonempty optimum")
        return Fraction(1)
    return Fraction(opt_val) / expectation


def _mcm_bound(alg, seq, maxdeg, driver):
    if alg == "alg1":
        return Fraction(64, 33) if seq.tree else None
    if alg == "alg2":
        if seq.tree:
            return Fraction(3, 2)
        if maxdeg <= 3:
            return Fraction(9, 5)
        return None
    if seq.tree:
        return Fraction(3, 2) + driver.eps
    return None


def _per_step_mcm(seq, alg, driver, per_step_sizes, cur_sizes, in_class, cap):
    opts = oracle.opt_matching_prefixes(seq, cap)
    min_ratio = None
    violations = 0
    for t, opt_t in enumerate(opts):
        if opt_t == 0:
            continue
        if alg == "alg3":
            # The per-insertion guarantee is on the designated output:
            # |M_c| * (3/2 + eps) >= OPT, exactly in integers.
            num = driver.eps.numerator
            den = driver.eps.denominator
            val = Fraction(cur_sizes[t])
            ok = cur_sizes[t] * (3 * den + 2 * num) >= 2 * den * opt_t
        else:
            k = 4 if alg == "alg1" else 3
            val = Fraction(per_step_sizes[t], k)
            floor = Fraction(33, 64) if alg == "alg1" else Fraction(2, 3)
            ok = val >= floor * opt_t
        r = val / opt_t
        if min_ratio is None or r < min_ratio:
            min_ratio = r
        if not ok:
            violations += 1
    ps = {
        "checked": len(opts),
        "min_ratio": None if min_ratio is None else float(min_ratio),
        "violations": violations,
    }
    return ps, (2 if violations and in_class else 0)


def _build_certificate(core, seq, scheme):
    if scheme == "auto":
        scheme = "tree" if seq.tree else "deg3"
    if scheme == "tree":
        cert = certmod.assign_duals_tree(core, seq)
        # The rooted scheme is not root-invariant; the sweep verdict is
        # reported as data while the produced certificate stands on its own
        # feasibility (check_certificate raises if it does not).
        ok, _, _, _ = certmod.check_all_roots(core, seq)
        certmod.check_certificate(cert, seq)
        return cert, ok
    if scheme == "deg3":
        cert = certmod.assign_duals_deg3(core, seq)
        certmod.check_certificate(cert, seq)
        return cert, None
    raise InputError("unknown certificate scheme %r" % scheme)


def _run_mwm(seq, alg, params, doc, sample, oracle_method, skip_opt, cap):
    exit_code = 0
    if alg == "mcgregor":
        gamma = params.get("gamma", 2**-0.5)
        driver = ThresholdMWM.run(seq, gamma)
        expectation = driver.matched_weight()
        doc["algorithm"]["params"]["gamma"] = gamma
        bound = (1 + gamma) * (2 + 1 / gamma)
        doc["weights"] = [driver.wsum]
        in_class = True
    else:
        p = params.get("p", 1 / 3)
        g1 = params.get("gamma1", 0.0)
        g2 = params.get("gamma2", 1.0)
        driver = TwoThresholdMWM.run(seq, p, g1, g2)
        expectation = driver.expected_weight()
        doc["algorithm"]["params"].update({"p": p, "gamma1": g1, "gamma2": g2})
        try:
            bound = float(theorem5_bound(float(p), float(g1), float(g2)))
        except InputError:
            bound = None
        doc["weights"] = list(driver.weights)
        in_class = seq.growing
        if seq.growing:
            driver.verify_final()
            doc["dual"] = {
                "total": driver.dual_total(),
                "min_slack": driver.min_dual_slack(),
                "growth_flags": driver.growth_flags,
            }
        if sample is not None:
            l, w = driver.sampled_weight(sample)
            doc["sampled"] = {"index": l + 1, "weight": w}
    doc["expectation"] = expectation
    doc["in_analyzed_class"] = in_class
    if bound is not None:
        doc["bound"] = bound
    if not skip_opt:
        opt_val = _opt_value(seq, oracle_method, cap)
        doc["opt"] = opt_val
        ratio = 1.0 if expectation == 0 and opt_val == 0 else opt_val / expectation
        doc["ratio"] = ratio
        if bound is not None and in_class and ratio > bound + RATIO_TOL:
            doc["bound_violated"] = True
            exit_code = 2
    return doc, exit_code


# -- subcommands ------------------------------------------------------------


def cmd_gen(args) -> int:
    params = {}
    if args.weighted:
        params["weighted"] = True
    if args.gamma is not None:
        params["gamma"] = args.gamma
    if args.delta is not None:
        params["delta"] = args.delta
    if args.maxdeg is not None:
        params["maxdeg"] = args.maxdeg
    if args.target_m is not None:
        params["m"] = args.target_m
    spec = GenSpec(args.kind, args.n, args.seed, params)
    text = format_instance(spec.build())
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _emit(docs, fmt, out):
    if fmt == "json":
        text = (
            reports.report_json(docs[0])
            if len(docs) == 1
            else reports.report_json(docs)
        )
        text += "\n"
    else:
        text = reports.csv_text(docs)
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    seq = read_instance(args.instance)
    params = {}
    if args.eps is not None:
        params["eps"] = _frac(args.eps)
    for name in ("p", "gamma1", "gamma2", "gamma"):
        val = getattr(args, name)
        if val is not None:
            params[name] = val
    info = _instance_info(seq, os.path.basename(args.instance))
    doc, code = execute_run(
        seq,
        args.alg,
        params,
        info,
        per_step=args.per_step,
        do_cert=args.certify,
        scheme=args.scheme,
        lemmas=args.lemmas,
        sample=args.sample,
        oracle_method=args.oracle,
        skip_opt=args.skip_opt,
        cap=args.cap,
    )
    _emit([doc], args.format, args.out)
    return code


def _sweep_cells(args):
    if args.alg == "alg3":
        eps_list = [_frac(s) for s in (args.eps or "1/4").split(",")]
        return [{"eps": e} for e in eps_list]
    if args.alg == "mwm":
        ps = [float(Fraction(s)) for s in (args.p or "1/3").split(",")]
        g1s = [float(Fraction(s)) for s in (args.gamma1 or "0").split(",")]
        g2s = [float(Fraction(s)) for s in (args.gamma2 or "1").split(",")]
        return [
            {"p": p, "gamma1": g1, "gamma2": g2}
            for p in ps
            for g1 in g1s
            for g2 in g2s
        ]
    if args.alg == "mcgregor":
        gs = [float(Fraction(s)) for s in (args.gamma or "1").split(",")]
        return [{"gamma": g} for g in gs]
    return [{}]


def _sweep_task(task):
    spec = GenSpec(task["kind"], task["n"], task["seed"], task["gen_params"])
    seq = spec.build()
    info = _instance_info(seq, spec.instance_id, kind=task["kind"], seed=task["seed"])
    doc, code = execute_run(
        seq,
        task["alg"],
        task["params"],
        info,
        per_step=task["per_step"],
        do_cert=task["certify"],
        scheme="auto",
        skip_opt=task["skip_opt"],
    )
    return doc, code


def cmd_sweep(args) -> int:
    if args.count < 0:
        raise InputError("--count must be nonnegative")
    cells = _sweep_cells(args)
    weighted = args.alg in ("mwm", "mcgregor") and args.kind not in (
        "mcgregor_adversary",
        "alg4_tight",
    )
    gen_params = {}
    if weighted or args.weighted:
        gen_params["weighted"] = True
    if args.maxdeg is not None:
        gen_params["maxdeg"] = args.maxdeg
    tasks = []
    for ci, cell in enumerate(cells):
        for i in range(args.count):
            tasks.append(
                {
                    "kind": args.kind,
                    "n": args.n,
                    "seed": args.seed + i,
                    "gen_params": gen_params,
                    "alg": args.alg,
                    "params": cell,
                    "per_step": args.per_step,
                    "certify": args.certify,
                    "skip_opt": args.skip_opt,
                    "cell": ci,
                }
            )
    threads = int(os.environ.get("MATCHKIT_THREADS", "1") or "1")
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    docs = []
    code = 0
    for ci, cell in enumerate(cells):
        ratios = []
        for t, (doc, c) in zip(tasks, results):
            if t["cell"] != ci:
                continue
            docs.append(doc)
            code = max(code, c)
            if doc.get("ratio") is not None:
                ratios.append(doc["ratio"])
        bound = _cell_bound(args.alg, cell)
        docs.append(reports.summary_doc(cell, args.alg, ratios, bound))
    _emit(docs, args.format, args.out)
    return code


def _cell_bound(alg, cell):
    if alg == "alg1":
        return float(Fraction(64, 33))
    if alg == "alg2":
        return 1.5
    if alg == "alg3":
        return float(Fraction(3, 2) + cell["eps"])
    if alg == "mwm":
        try:
            return float(theorem5_bound(cell["p"], cell["gamma1"], cell["gamma2"]))
        except InputError:
            return None
    if alg == "mcgregor":
        g = cell["gamma"]
        return (1 + g) * (2 + 1 / g)
    return None


def cmd_opt(args) -> int:
    seq = read_instance(args.instance)
    res = oracle.opt_matching(seq, method=args.method, cap=args.cap)
    doc = {"value": res.value, "witness": res.witness if args.witness else None}
    text = reports.report_json(doc) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_certify(args) -> int:
    seq = read_instance(args.instance)
    driver = IncrementalMCM.run(seq)
    scheme = args.scheme
    if scheme == "auto":
        scheme = "tree" if seq.tree else "deg3"
    all_roots_ok = None
    if scheme == "tree":
        cert = certmod.assign_duals_tree(driver.core, seq, root_choice=args.root_seed)
        all_roots_ok, _, _, _ = certmod.check_all_roots(driver.core, seq)
    else:
        cert = certmod.assign_duals_deg3(driver.core, seq)
    certmod.check_certificate(cert, seq)
    opt_val = None if args.skip_opt else _opt_value(seq, "auto", args.cap)
    certified = certmod.weak_duality_ratio(cert, driver.expected_size(), opt_val)
    doc = {
        "scheme": cert.scheme,
        "threshold": _frac_json(cert.threshold),
        "total": _frac_json(cert.total),
        "min_slack": _frac_json(cert.min_slack),
        "min_edge": cert.min_edge,
        "feasible": cert.feasible,
        "all_roots_ok": all_roots_ok,
        "certified_ratio": float(certified),
        "y": {str(v): _frac_json(q) for v, q in sorted(cert.y.items())},
    }
    text = reports.report_json(doc) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> _Parser:
    ap = _Parser(prog="matchkit", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--kind", required=True, choices=sorted(GENERATORS))
    g.add_argument("--n", required=True, type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--weighted", action="store_true")
    g.add_argument("--gamma", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--maxdeg", type=int)
    g.add_argument("--target-m", type=int)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gen)

    r = sub.add_parser("run", help="run one algorithm over an instance file")
    r.add_argument("instance")
    r.add_argument("--alg", required=True, choices=ALGS)
    r.add_argument("--eps", help="alg3 approximation slack, e.g. 1/4")
    r.add_argument("--p", type=float)
    r.add_argument("--gamma1", type=float)
    r.add_argument("--gamma2", type=float)
    r.add_argument("--gamma", type=float)
    r.add_argument("--per-step", action="store_true",
                   help="check the output bound after every insertion")
    r.add_argument("--certify", action="store_true",
                   help="attach a dual certificate (alg2)")
    r.add_argument("--scheme", choices=("auto", "tree", "deg3"), default="auto")
    r.add_argument("--lemmas", action="store_true",
                   help="attach structural checks (alg1)")
    r.add_argument("--sample", type=int, help="sampled-output mode seed")
    r.add_argument("--oracle", choices=("auto", "forest", "exact"), default="auto")
    r.add_argument("--skip-opt", action="store_true")
    r.add_argument("--cap", type=int, default=oracle.EXACT_EDGE_CAP)
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("--out")
    r.set_defaults(fn=cmd_run)

    s = sub.add_parser("sweep", help="run a parameter grid over generated instances")
    s.add_argument("--alg", required=True, choices=ALGS)
    s.add_argument("--kind", required=True, choices=sorted(GENERATORS))
    s.add_argument("--n", required=True, type=int)
    s.add_argument("--count", required=True, type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eps", help="comma-separated alg3 eps values")
    s.add_argument("--p", help="comma-separated mwm p values")
    s.add_argument("--gamma1", help="comma-separated mwm gamma1 values")
    s.add_argument("--gamma2", help="comma-separated mwm gamma2 values")
    s.add_argument("--gamma", help="comma-separated mcgregor gamma values")
    s.add_argument("--weighted", action="store_true")
    s.add_argument("--maxdeg", type=int)
    s.add_argument("--per-step", action="store_true")
    s.add_argument("--certify", action="store_true")
    s.add_argument("--skip-opt", action="store_true")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)

    o = sub.add_parser("opt", help="exact optimum of an instance")
    o.add_argument("instance")
    o.add_argument("--method", choices=("auto", "forest", "exact"), default="auto")
    o.add_argument("--cap", type=int, default=oracle.EXACT_EDGE_CAP)
    o.add_argument("--witness", action="store_true")
    o.add_argument("--out")
    o.set_defaults(fn=cmd_opt)

    c = sub.add_parser("certify", help="dual certificate for an alg2 run")
    c.add_argument("instance")
    c.add_argument("--scheme", choices=("auto", "tree", "deg3"), default="auto")
    c.add_argument("--root-seed", type=int, default=0)
    c.add_argument("--skip-opt", action="store_true")
    c.add_argument("--cap", type=int, default=oracle.EXACT_EDGE_CAP)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_certify)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except InvariantError as exc:
        print("invariant violation: %s" % exc, file=sys.stderr)
        return 2
    except CertificateError as exc:
        print("certificate failure: %s" % exc, file=sys.stderr)
        return 3
    except (InputError, OSError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 4
    except MatchkitError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
