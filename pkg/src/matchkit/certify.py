"""Dual certificates for the incremental engine's final states.

Both schemes assign fractional vertex duals y so that every final edge
satisfies y_u + y_v >= threshold while sum(y) equals |M_1|+|M_2|+|M_3|;
weak duality then certifies OPT <= sum(y)/threshold, which divided by the
expected matching size (sum sizes / 3) bounds the achieved ratio without
re-running the oracle.  All arithmetic is exact: integers inside the kernels
(the degree-3 scheme counts in sixths), Fractions at this API.

* Tree scheme (threshold 2): orient each component toward a root; an edge in
  t matchings charges t=1 one unit to its parent endpoint, t=2 one to each,
  t=3 three to the parent.  Feasibility can depend on the root, so the
  constructor searches for a feasible one and check_all_roots reports the
  literal per-root sweep.
* Degree-3 scheme (threshold 5/3): an edge in t >= 2 matchings splits t
  between its endpoints; an edge in exactly one matching gives 2/3 to an
  endpoint covered by just that one matching (when exactly one endpoint is
  so exposed) and 1/3 to the other, else 1/2 each.  Two exposed endpoints
  would mean some matching is not maximal — construction refuses.
"""

import json
from dataclasses import dataclass
from fractions import Fraction

from matchkit.backend import tree_cert_scan_all_roots, tree_cert_scan_root
from matchkit.errors import CertificateError
from matchkit.generators import SplitMix64
from matchkit.graphcore import ArrivalSequence, MultiMatchingState


@dataclass
class DualCertificate:
    scheme: str
    threshold: Fraction
    y: dict  # vertex -> Fraction
    total: Fraction
    min_slack: Fraction
    min_edge: int
    feasible: bool

    def opt_bound(self) -> Fraction:
        """Weak duality: no matching can weigh more than sum(y)/threshold."""
        return self.total / self.threshold

    def to_json(self) -> str:
        def frac(q):
            return {"num": q.numerator, "den": q.denominator}

        doc = {
            "scheme": self.scheme,
            "threshold": frac(self.threshold),
            "total": frac(self.total),
            "min_slack": frac(self.min_slack),
            "min_edge": self.min_edge,
            "feasible": self.feasible,
            "y": {str(v): frac(q) for v, q in sorted(self.y.items())},
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def _tcounts(core: MultiMatchingState):
    """Per-edge membership count over M_1..M_3."""
    mask = core.mask
    return [((m >> 0) & 1) + ((m >> 1) & 1) + ((m >> 2) & 1) for m in mask]


def _finalize(scheme, threshold, y, expected_total):
    total = sum(y.values(), Fraction(0))
    if total != expected_total:
        raise CertificateError(
            "charge conservation broken: sum(y)=%s, memberships total %s"
            % (total, expected_total)
        )
    return total


def assign_duals_tree(core: MultiMatchingState, seq: ArrivalSequence, root_choice: int = 0):
    """Tree-scheme certificate for the final state of the three-matching
    incremental engine on a forest.

    The charge rules are orientation-dependent, and feasibility genuinely
    depends on the root: a vertex whose only coverage in some matching comes
    through its parent edge receives no charge from it, so a fixed root can
    leave an edge constraint short even though another root satisfies all of
    them.  (No orientation rule can be root-invariant here: the two
    orientations of the same state would need the single-matching charge sent
    to opposite endpoints.)  This constructor therefore searches each
    component's roots in a seeded rotation (root_choice seeds the starting
    point) and keeps the first feasible one; if none is feasible the first
    tried root's assignment is returned with ``feasible=False``.  Use
    check_all_roots for the exhaustive per-root verdict."""
    n, us, vs, _ = seq.arrays()
    tcnt = _tcounts(core)
    rng = SplitMix64(root_choice)
    # Pick one root per component, then scan each component once.
    comp = [-1] * n
    comps = []
    adj = [[] for _ in range(n)]
    for e in range(len(us)):
        adj[us[e]].append(vs[e])
        adj[vs[e]].append(us[e])
    for v in range(n):
        if comp[v] != -1:
            continue
        members = [v]
        comp[v] = len(comps)
        stack = [v]
        while stack:
            x = stack.pop()
            for w in adj[x]:
                if comp[w] == -1:
                    comp[w] = len(comps)
                    members.append(w)
                    stack.append(w)
        comps.append(members)
    y = {}
    min_slack = None
    min_edge = -1
    for members in comps:
        # Rotate through the component's vertices from a seeded start and
        # keep the first root whose scan is feasible; otherwise fall back to
        # the first root tried.
        start = rng.randrange(len(members))
        chosen = None
        for off in range(len(members)):
            root = members[(start + off) % len(members)]
            scan = tree_cert_scan_root(n, us, vs, tcnt, root)
            if chosen is None:
                chosen = scan
            if scan[2] >= 2:
                chosen = scan
                break
        yv, cmembers, slack, edge = chosen
        for x in cmembers:
            y[x] = Fraction(yv[x])
        if edge != -1 and (min_slack is None or slack < min_slack):
            min_slack = slack
            min_edge = edge
    expected = Fraction(core.sizes[0] + core.sizes[1] + core.sizes[2])
    total = _finalize("tree", Fraction(2), y, expected)
    if min_slack is None:
        min_slack = Fraction(2)  # no edges: vacuously feasible
    return DualCertificate(
        "tree", Fraction(2), y, total, Fraction(min_slack), min_edge, Fraction(min_slack) >= 2
    )


def check_all_roots(core: MultiMatchingState, seq: ArrivalSequence):
    """Exhaustive root sweep of the tree scheme: every vertex roots its own
    component once.  Returns (ok, min_slack, bad_root, bad_edge)."""
    n, us, vs, _ = seq.arrays()
    tcnt = _tcounts(core)
    return tree_cert_scan_all_roots(n, us, vs, tcnt)


def assign_duals_deg3(core: MultiMatchingState, seq: ArrivalSequence):
    """Degree-3 scheme certificate for the final state of the three-matching
    incremental engine on a graph of maximum degree 3."""
    n, us, vs, _ = seq.arrays()
    deg = [0] * n
    for e in range(len(us)):
        deg[us[e]] += 1
        deg[vs[e]] += 1
    if any(d > 3 for d in deg):
        raise CertificateError("degree-3 scheme needs maximum degree 3")
    tcnt = _tcounts(core)
    mats = [core.matched_at(i) for i in range(3)]
    # covered[v]: how many matchings have an edge at v (any edge, including
    # the one being charged).
    covered = [0] * n
    for v in range(n):
        covered[v] = sum(1 for i in range(3) if mats[i][v] != -1)
    y = {v: Fraction(0) for v in range(n)}
    half = Fraction(1, 2)
    third = Fraction(1, 3)
    for e in range(len(us)):
        t = tcnt[e]
        u, v = us[e], vs[e]
        if t == 0:
            continue
        if t >= 2:
            y[u] += t * half
            y[v] += t * half
            continue
        exp_u = covered[u] == 1
        exp_v = covered[v] == 1
        if exp_u and exp_v:
            raise CertificateError(
                "edge %d has both endpoints covered by a single matching; "
                "some matching is not maximal" % e
            )
        if exp_u:
            y[u] += 2 * third
            y[v] += third
        elif exp_v:
            y[v] += 2 * third
            y[u] += third
        else:
            y[u] += half
            y[v] += half
    expected = Fraction(core.sizes[0] + core.sizes[1] + core.sizes[2])
    total = _finalize("deg3", Fraction(5, 3), y, expected)
    min_slack = None
    min_edge = -1
    for e in range(len(us)):
        s = y[us[e]] + y[vs[e]]
        if min_slack is None or s < min_slack:
            min_slack = s
            min_edge = e
    if min_slack is None:
        min_slack = Fraction(5, 3)
    return DualCertificate(
        "deg3", Fraction(5, 3), y, total, min_slack, min_edge, min_slack >= Fraction(5, 3)
    )


def check_certificate(cert: DualCertificate, seq: ArrivalSequence, expected_total=None):
    """Independent recheck of a certificate against the graph: per-edge
    constraints at the threshold and (optionally) charge conservation.
    Raises CertificateError on failure, returns True otherwise."""
    for e in seq.edges:
        s = cert.y.get(e.u, Fraction(0)) + cert.y.get(e.v, Fraction(0))
        if s < cert.threshold:
            raise CertificateError(
                "edge %d: %s + %s < threshold %s" % (e.id, cert.y.get(e.u), cert.y.get(e.v), cert.threshold)
            )
    if expected_total is not None and cert.total != expected_total:
        raise CertificateError(
            "conservation mismatch: %s != %s" % (cert.total, expected_total)
        )
    return True


def weak_duality_ratio(cert: DualCertificate, expected_size, opt_value=None) -> Fraction:
    """Certified competitive ratio: (sum(y)/threshold) / expected_size.

    Refuses infeasible certificates.  With the oracle's opt_value supplied,
    also asserts OPT <= sum(y)/threshold, the weak-duality direction the
    whole scheme rests on.  Empty instances are 1 by convention.
    """
    if not cert.feasible:
        raise CertificateError("certificate is infeasible; no ratio can be certified")
    bound = cert.opt_bound()
    if opt_value is not None and Fraction(opt_value) > bound:
        raise CertificateError(
            "weak duality violated: OPT %s exceeds certified bound %s"
            % (opt_value, bound)
        )
    expected = Fraction(expected_size)
    if expected == 0:
        if bound != 0:
            raise CertificateError("empty output but positive dual bound %s" % bound)
        return Fraction(1)
    return bound / expected
