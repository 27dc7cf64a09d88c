"""Four-matching preemptive maximum-cardinality matching on tree streams.

The engine maintains matchings M_1..M_4 and outputs one of them uniformly at
random (expected size = sum of sizes / 4; sampling mode picks the index from
a seed).  Each arrival first augments into every conflict-free matching, then
tries, for M_2, M_3, M_4 in order, to switch in by evicting its conflicts —
committing only when that strictly decreases the matching's
qualified-intersection score Q_i.  Evictions are permanent: rejected or
evicted edges never re-enter any matching.

Also here: the final-state edge classifier (bad / internal / leaf edges) and
the two structural checkers the analysis rests on — bounded runs of
bad-incident vertices on tree instances, and the two properties of edges
that end up only in M_4.
"""

from dataclasses import dataclass
from fractions import Fraction

from matchkit.errors import InvariantError
from matchkit.generators import SplitMix64
from matchkit.graphcore import ArrivalSequence, MultiMatchingState


class PreemptiveMCM:
    """Driver for the four-matching preemptive engine."""

    K = 4

    def __init__(self):
        self.core = MultiMatchingState(4)

    @classmethod
    def run(cls, seq: ArrivalSequence) -> "PreemptiveMCM":
        alg = cls()
        for e in seq.edges:
            alg.core.process_preemptive4(e.u, e.v)
        return alg

    def process_edge(self, u: int, v: int) -> int:
        return self.core.process_preemptive4(u, v)

    @property
    def sizes(self):
        return list(self.core.sizes)

    def expected_size(self) -> Fraction:
        return Fraction(sum(self.core.sizes), 4)

    def sampled_size(self, seed: int):
        """Fidelity mode: the output index drawn from the seed, and its size."""
        l = SplitMix64(seed).randrange(4)
        return l, self.core.sizes[l]


@dataclass
class EdgeClass:
    eid: int
    is_bad: bool
    is_internal: bool
    is_leaf_edge: bool


def classify_edges(core: MultiMatchingState):
    """Classify every revealed edge of a final state.

    bad: covered by exactly three matchings (coverage below three is a state
    invariant violation and raises).  internal: some matched edge other than
    the edge itself exists at each endpoint.  leaf: not internal — one
    endpoint is a leaf or carries no other matched edge.  The two classes
    partition the edges by construction.
    """
    out = []
    k = core.k
    eu, ev = core.eu, core.ev
    mats = [core.matched_at(i) for i in range(k)]
    for e in range(len(eu)):
        cov = core.coverage(e)
        if cov < 3:
            raise InvariantError("edge %d covered by only %d matchings" % (e, cov))
        u = eu[e]
        v = ev[e]
        side = []
        for x in (u, v):
            other = False
            for i in range(k):
                c = mats[i][x]
                if c != -1 and c != e:
                    other = True
                    break
            side.append(other)
        internal = side[0] and side[1]
        out.append(EdgeClass(e, cov == 3, internal, not internal))
    return out


@dataclass
class LemmaReport:
    ok: bool
    max_run: int
    witness: list


def check_lemma_internal(core: MultiMatchingState, classes) -> LemmaReport:
    """Longest path of consecutive bad-incident vertices in the final forest.

    Passes iff no path of more than five vertices has a bad edge incident to
    every vertex; on failure the witness lists such a path's vertices.
    """
    nv = core.nv
    eu, ev = core.eu, core.ev
    bad_inc = [False] * nv
    for c in classes:
        if c.is_bad:
            bad_inc[eu[c.eid]] = True
            bad_inc[ev[c.eid]] = True
    # Adjacency of the induced forest on bad-incident vertices.
    adj = [[] for _ in range(nv)]
    for e in range(len(eu)):
        u = eu[e]
        v = ev[e]
        if bad_inc[u] and bad_inc[v]:
            adj[u].append(v)
            adj[v].append(u)

    def farthest(src):
        prev = {src: -1}
        frontier = [src]
        last = src
        while frontier:
            nxt = []
            for x in frontier:
                last = x
                for y in adj[x]:
                    if y not in prev:
                        prev[y] = x
                        nxt.append(y)
            frontier = nxt
        return last, prev

    best_len = 0
    best_path = []
    seen = [False] * nv
    for s in range(nv):
        if not bad_inc[s] or seen[s]:
            continue
        a, prev = farthest(s)
        for x in prev:
            seen[x] = True
        b, prev = farthest(a)
        path = []
        x = b
        while x != -1:
            path.append(x)
            x = prev[x]
        if len(path) > best_len:
            best_len = len(path)
            best_path = path
    ok = best_len <= 5
    return LemmaReport(ok, best_len, best_path if not ok else [])


@dataclass
class M4OnlyReport:
    ok: bool
    endpoint_violations: list  # M_4-only edges with bad edges at both ends
    switch_violations: list  # bad edges whose sole entry into M_4 was a switch


def check_m4bad(core: MultiMatchingState, classes) -> M4OnlyReport:
    """Two properties of M_4 membership in final states.

    (a) An edge belonging only to M_4 cannot have other bad edges incident
    at both of its endpoints.  (b) An edge whose only entry into M_4 was a
    switch (never an augment) cannot be bad.
    """
    nv = core.nv
    eu, ev = core.eu, core.ev
    mask = core.mask
    bad = [c.is_bad for c in classes]
    bad_cnt = [0] * nv
    for c in classes:
        if c.is_bad:
            bad_cnt[eu[c.eid]] += 1
            bad_cnt[ev[c.eid]] += 1
    endpoint_violations = []
    for e in range(len(eu)):
        if mask[e] != 0b1000:
            continue
        u = eu[e]
        v = ev[e]
        self_bad = 1 if bad[e] else 0
        if bad_cnt[u] - self_bad > 0 and bad_cnt[v] - self_bad > 0:
            endpoint_violations.append(e)
    # How each edge entered M_4, from the event log (at most one add per
    # edge: entries happen only in the edge's own round).
    m4_entry = {}
    for eid, i, action, _step in core.events:
        if i == 3 and action != 2 and eid not in m4_entry:
            m4_entry[eid] = action
    switch_violations = [
        eid for eid, action in m4_entry.items() if action == 1 and bad[eid]
    ]
    ok = not endpoint_violations and not switch_violations
    return M4OnlyReport(ok, endpoint_violations, switch_violations)
