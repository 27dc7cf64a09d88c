"""Exact maximum-matching oracles.

Two independent routes to ground truth:

* opt_matching_forest: rooted dynamic program over forests (kernel-backed,
  linear time), exact ints in cardinality mode.
* opt_matching_exact: branch-and-bound over arbitrary graphs at desk scale,
  deliberately implemented here in plain Python with no shared code so the
  two oracles can check each other.

Both return an OptResult whose witness is a list of edge ids; the witness is
always a valid matching achieving the value.
"""

from dataclasses import dataclass

from matchkit.backend import forest_opt, forest_opt_prefix
from matchkit.errors import InvariantError, OracleCapError
from matchkit.graphcore import ArrivalSequence, Matching

EXACT_EDGE_CAP = 64


@dataclass
class OptResult:
    value: float
    witness: list

    def as_matching(self, seq: ArrivalSequence) -> Matching:
        m = Matching()
        for eid in self.witness:
            m.add(seq.edges[eid])
        return m


def opt_matching_forest(seq: ArrivalSequence) -> OptResult:
    """Optimum matching of a forest; raises CyclicGraphError on cycles."""
    n, us, vs, ws = seq.arrays()
    weights = ws if seq.mode == "mwm" else None
    value, wit = forest_opt(n, us, vs, weights)
    return OptResult(value, wit)


def opt_matching_forest_prefixes(seq: ArrivalSequence):
    """Optimum value after every arrival prefix (recomputed from scratch)."""
    n, us, vs, ws = seq.arrays()
    weights = ws if seq.mode == "mwm" else None
    return forest_opt_prefix(n, us, vs, weights)


def opt_matching_prefixes(seq: ArrivalSequence, cap: int = EXACT_EDGE_CAP):
    """Optimum value after every arrival prefix: forest DP when the final
    graph is a forest, else branch-and-bound per prefix (cap applies)."""
    if _is_forest(seq):
        return opt_matching_forest_prefixes(seq)
    if len(seq.edges) > cap:
        raise OracleCapError(
            "cyclic instance has %d edges; per-prefix exact oracle is capped at %d"
            % (len(seq.edges), cap)
        )
    values = []
    for t in range(len(seq.edges)):
        prefix = ArrivalSequence(seq.edges[: t + 1], mode=seq.mode)
        values.append(opt_matching_exact(prefix, cap).value)
    return values


def opt_matching_exact(seq: ArrivalSequence, cap: int = EXACT_EDGE_CAP) -> OptResult:
    """Exact optimum by branch-and-bound; refuses instances over the cap."""
    m = len(seq.edges)
    if m > cap:
        raise OracleCapError(
            "instance has %d edges; the exact oracle is capped at %d" % (m, cap)
        )
    n = seq.n_vertices
    unit = seq.mode != "mwm"
    adj = [[] for _ in range(n)]
    for e in seq.edges:
        w = 1 if unit else e.w
        adj[e.u].append((e.v, e.id, w))
        adj[e.v].append((e.u, e.id, w))
    # Branch on the live vertex of highest degree: either it stays unmatched
    # for good, or one of its edges is in the matching.  Bound: half the sum
    # over live vertices of their heaviest live edge.
    matched = [False] * n
    excluded = [False] * n
    best_val = 0
    best_wit = []
    chosen = []

    def bound():
        b = 0.0
        for x in range(n):
            if matched[x] or excluded[x]:
                continue
            hi = 0
            for y, _e, w in adj[x]:
                if not matched[y] and not excluded[y] and w > hi:
                    hi = w
            b += hi
        return b / 2.0

    def solve(cur):
        nonlocal best_val, best_wit
        pick = -1
        pick_deg = -1
        for x in range(n):
            if matched[x] or excluded[x]:
                continue
            d = 0
            for y, _e, _w in adj[x]:
                if not matched[y] and not excluded[y]:
                    d += 1
            if d > pick_deg and d > 0:
                pick = x
                pick_deg = d
        if pick == -1:
            if cur > best_val:
                best_val = cur
                best_wit = list(chosen)
            return
        if cur + bound() <= best_val:
            return
        # Heaviest-first edge branches, then the unmatched branch.
        branches = sorted(
            (( -w, e, y) for y, e, w in adj[pick] if not matched[y] and not excluded[y]),
        )
        for negw, e, y in branches:
            matched[pick] = matched[y] = True
            chosen.append(e)
            solve(cur - negw)
            chosen.pop()
            matched[pick] = matched[y] = False
        excluded[pick] = True
        solve(cur)
        excluded[pick] = False

    solve(0)
    best_wit.sort()
    check = Matching()
    for eid in best_wit:
        check.add(seq.edges[eid])  # raises if the witness is not a matching
    val = sum(1 if unit else seq.edges[eid].w for eid in best_wit)
    if unit and val != best_val:
        raise InvariantError("oracle witness value mismatch")
    return OptResult(best_val, best_wit)


def opt_matching(seq: ArrivalSequence, method: str = "auto", cap: int = EXACT_EDGE_CAP):
    """Dispatch: forest DP when the final graph is a forest, else exact."""
    if method == "forest":
        return opt_matching_forest(seq)
    if method == "exact":
        return opt_matching_exact(seq, cap)
    if method != "auto":
        raise ValueError("unknown oracle method %r" % method)
    if _is_forest(seq):
        return opt_matching_forest(seq)
    return opt_matching_exact(seq, cap)


def _is_forest(seq: ArrivalSequence) -> bool:
    uf = list(range(seq.n_vertices))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    for e in seq.edges:
        ru, rv = find(e.u), find(e.v)
        if ru == rv:
            return False
        uf[ru] = rv
    return True
