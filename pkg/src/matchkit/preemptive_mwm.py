"""Preemptive maximum-weight matching on growing trees, with live duals.

TwoThresholdMWM maintains matchings M_1, M_2 with acceptance thresholds
gamma_1, gamma_2: a new edge enters M_i (evicting its conflicts) exactly
when its weight strictly exceeds (1 + gamma_i) times their weight sum; ties
reject.  The output is M_1 with probability p, else M_2, so the expected
weight is p*w(M_1) + (1-p)*w(M_2) and each edge's primal value is
x_e = p*[e in M_1] + (1-p)*[e in M_2].

On growing-tree arrivals the driver also maintains the matching vertex
duals round by round (new vertex v, old vertex u with previously matched
edges e_1, e_2, absent weights taken as 0):

* rejected by both: nothing changes, y_v stays 0;
* accepted into M_1 only: y_u rises to min((1+g1) w(e), (1+g2) w(e_2));
* accepted into M_2 only: y_u rises to min((1+g1) w(e_1), (1+g2) w(e));
* accepted into both:     y_u rises to (1+g1) w(e), y_v becomes the same;

"rises to" meaning max with the old value — duals never decrease.  Each
round the driver checks the new constraint y_u + y_v >= w(e), the primal
bookkeeping, and the vertex lower bound y_u >= min((1+g1) w(e_1),
(1+g2) w(e_2)); violations raise InvariantError.  The per-round growth
bound d(dual) <= ratio_bound * d(primal) is only flagged (counted), since
it is the one inequality whose tightness depends on the parameter cell.

theorem5_bound gives the certified competitive ratio for a parameter cell;
with exact (int or Fraction) inputs the result is an exact rational.
ThresholdMWM is the classic single-matching (1+gamma)-threshold rule used
as a baseline.
"""

from dataclasses import dataclass

from matchkit.errors import InputError, InvariantError
from matchkit.generators import SplitMix64
from matchkit.graphcore import ArrivalSequence, Edge, Matching, conflicts

TOL = 1e-9


def theorem5_bound(p, gamma1, gamma2):
    """Competitive-ratio bound for parameters (p, gamma1, gamma2): the worst
    of the three per-round growth cases.  Exact for exact inputs."""
    if not 0 < p < 1:
        raise InputError("p must lie strictly between 0 and 1")
    if gamma1 < 0 or gamma2 < 0:
        raise InputError("gamma parameters must be nonnegative")
    denom = p * gamma1 + (1 - p) * gamma2 + gamma1 * gamma2
    if denom <= 0:
        raise InputError("ratio bound undefined: zero denominator for these parameters")
    t1 = (1 + gamma1) / p
    t2 = (1 + gamma2) / (1 - p)
    t3 = (1 + gamma1) * (1 + gamma2) * (1 + 2 * gamma1) / denom
    return max(t1, t2, t3)


def _ge(a, b) -> bool:
    """a >= b up to relative tolerance TOL."""
    m = max(1.0, abs(a), abs(b))
    return a >= b - TOL * m


@dataclass
class RoundRecord:
    eid: int
    in_m1: bool
    in_m2: bool
    evicted: tuple
    d_primal: float
    d_dual: float


class TwoThresholdMWM:
    """Two-matching preemptive MWM engine with optional dual tracking."""

    def __init__(self, p, gamma1, gamma2, track_duals=True):
        if not 0 < p < 1:
            raise InputError("p must lie strictly between 0 and 1")
        if gamma1 < 0 or gamma2 < 0:
            raise InputError("gamma parameters must be nonnegative")
        self.p = p
        self.gammas = (gamma1, gamma2)
        self.coef = (float(p), float(1 - p))
        self.m = (Matching(), Matching())
        self.wsum = [0.0, 0.0]
        self.x = {}
        self.y = {}
        self.seen = set()
        self.edges = {}
        self.track_duals = track_duals
        self.rounds = []
        self.growth_flags = 0  # rounds where d(dual) > bound * d(primal)
        try:
            self._bound = float(theorem5_bound(float(p), float(gamma1), float(gamma2)))
        except InputError:
            self._bound = None

    @classmethod
    def run(cls, seq: ArrivalSequence, p, gamma1, gamma2) -> "TwoThresholdMWM":
        alg = cls(p, gamma1, gamma2, track_duals=seq.growing)
        for e in seq.edges:
            alg.process_edge(e)
        return alg

    def process_edge(self, e: Edge) -> RoundRecord:
        u, v = e.u, e.v
        if self.seen:
            if e.u in self.seen and e.v not in self.seen:
                u, v = e.u, e.v
            elif e.v in self.seen and e.u not in self.seen:
                u, v = e.v, e.u
            elif self.track_duals:
                raise InvariantError(
                    "dual accounting needs growing-tree arrivals; edge %d has "
                    "%d previously seen endpoints"
                    % (e.id, (e.u in self.seen) + (e.v in self.seen))
                )
        self.edges[e.id] = e
        g1, g2 = self.gammas
        old = (self.m[0].edge_at(u), self.m[1].edge_at(u))
        w_old = tuple(0.0 if c is None else c.w for c in old)
        accepted = [False, False]
        evicted = []
        d_primal = 0.0
        for i in (0, 1):
            xs = conflicts(self.m[i], e)
            sx = sum(self.edges[c].w for c in xs)
            if e.w > (1 + self.gammas[i]) * sx:
                for c in xs:
                    ce = self.edges[c]
                    self.m[i].remove(ce)
                    self.wsum[i] -= ce.w
                    self.x[c] -= self.coef[i]
                    d_primal -= self.coef[i] * ce.w
                    evicted.append(c)
                self.m[i].add(e)
                self.wsum[i] += e.w
                d_primal += self.coef[i] * e.w
                accepted[i] = True
        self.x[e.id] = (self.coef[0] if accepted[0] else 0.0) + (
            self.coef[1] if accepted[1] else 0.0
        )
        d_dual = 0.0
        if self.track_duals:
            yu0 = self.y.get(u, 0.0)
            yv0 = self.y.get(v, 0.0)
            if accepted[0] and accepted[1]:
                self.y[u] = max(yu0, (1 + g1) * e.w)
                self.y[v] = max(yv0, (1 + g1) * e.w)
            elif accepted[0]:
                self.y[u] = max(yu0, min((1 + g1) * e.w, (1 + g2) * w_old[1]))
            elif accepted[1]:
                self.y[u] = max(yu0, min((1 + g1) * w_old[0], (1 + g2) * e.w))
            d_dual = (self.y.get(u, 0.0) - yu0) + (self.y.get(v, 0.0) - yv0)
        self.seen.add(e.u)
        self.seen.add(e.v)
        rec = RoundRecord(e.id, accepted[0], accepted[1], tuple(evicted), d_primal, d_dual)
        self.rounds.append(rec)
        if self.track_duals:
            self._check_round(e, u, v, evicted, rec)
        return rec

    # -- invariants --------------------------------------------------------

    def _check_round(self, e, u, v, evicted, rec):
        yu = self.y.get(u, 0.0)
        yv = self.y.get(v, 0.0)
        if not _ge(yu + yv, e.w):
            raise InvariantError(
                "dual constraint broken on arrival %d: %r + %r < %r" % (e.id, yu, yv, e.w)
            )
        for eid in (e.id, *evicted):
            self._check_primal_value(eid)
        self._check_vertex_bound(u)
        self._check_vertex_bound(v)
        if self._bound is not None and rec.d_primal > TOL:
            if rec.d_dual > self._bound * rec.d_primal * (1 + TOL) + TOL:
                self.growth_flags += 1

    def _check_primal_value(self, eid):
        e = self.edges[eid]
        want = (self.coef[0] if e.id in self.m[0].members else 0.0) + (
            self.coef[1] if e.id in self.m[1].members else 0.0
        )
        have = self.x.get(eid, 0.0)
        if abs(have - want) > TOL * max(1.0, abs(want)):
            raise InvariantError(
                "primal value of edge %d is %r, membership implies %r" % (eid, have, want)
            )

    def _check_vertex_bound(self, vtx):
        g1, g2 = self.gammas
        c1 = self.m[0].edge_at(vtx)
        c2 = self.m[1].edge_at(vtx)
        lo = min(
            (1 + g1) * (0.0 if c1 is None else c1.w),
            (1 + g2) * (0.0 if c2 is None else c2.w),
        )
        if not _ge(self.y.get(vtx, 0.0), lo):
            raise InvariantError(
                "vertex %d dual %r below lower bound %r" % (vtx, self.y.get(vtx, 0.0), lo)
            )

    def verify_final(self):
        """Full-state scan of every invariant; raises on the first failure."""
        for e in self.edges.values():
            self._check_primal_value(e.id)
            if self.track_duals and not _ge(
                self.y.get(e.u, 0.0) + self.y.get(e.v, 0.0), e.w
            ):
                raise InvariantError("dual constraint broken at edge %d" % e.id)
        if self.track_duals:
            for vtx in self.seen:
                self._check_vertex_bound(vtx)

    # -- results -----------------------------------------------------------

    @property
    def weights(self):
        return tuple(self.wsum)

    def expected_weight(self) -> float:
        return self.coef[0] * self.wsum[0] + self.coef[1] * self.wsum[1]

    def primal_total(self) -> float:
        return sum(self.x[c] * self.edges[c].w for c in self.x)

    def dual_total(self) -> float:
        return sum(self.y.values())

    def min_dual_slack(self) -> float:
        """Smallest relative slack of y_u + y_v - w_e over revealed edges."""
        best = float("inf")
        for e in self.edges.values():
            s = self.y.get(e.u, 0.0) + self.y.get(e.v, 0.0) - e.w
            best = min(best, s / max(1.0, abs(e.w)))
        return best

    def sampled_weight(self, seed: int):
        l = 0 if SplitMix64(seed).uniform01() <= self.coef[0] else 1
        return l, self.wsum[l]


class ThresholdMWM:
    """Single-matching preemptive rule: accept when the new weight strictly
    beats (1 + gamma) times the weight of the conflicting edges."""

    def __init__(self, gamma):
        if gamma <= 0:
            raise InputError("gamma must be positive")
        self.gamma = gamma
        self.m = Matching()
        self.wsum = 0.0
        self.edges = {}

    @classmethod
    def run(cls, seq: ArrivalSequence, gamma) -> "ThresholdMWM":
        alg = cls(gamma)
        for e in seq.edges:
            alg.process_edge(e)
        return alg

    def process_edge(self, e: Edge) -> bool:
        self.edges[e.id] = e
        xs = conflicts(self.m, e)
        sx = sum(self.edges[c].w for c in xs)
        if e.w > (1 + self.gamma) * sx:
            for c in xs:
                self.m.remove(self.edges[c])
                self.wsum -= self.edges[c].w
            self.m.add(e)
            self.wsum += e.w
            return True
        return False

    def matched_weight(self) -> float:
        return self.wsum
