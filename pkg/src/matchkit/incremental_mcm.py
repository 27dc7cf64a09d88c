"""Incremental maximum-cardinality matching with constant-time updates.

Two engines over the shared multi-matching kernel:

* IncrementalMCM — three matchings, output chosen uniformly at random.
  Augment, then switch (same qualified-intersection rule as the preemptive
  engine, over three matchings), then re-add: every discarded edge frees one
  far endpoint, whose matched edges in the other matchings rejoin the
  switched matching when conflict-free.  Unlike the preemptive setting,
  discarded edges may return later.  Every matching stays maximal after
  every update and the per-update work is bounded by a constant.

* DeterministicIncrementalMCM — matchings M_1..M_3 plus a support matching
  M_4 that holds edges the others rejected, with a designated current output
  M_c.  Switches need exactly one conflict and a strict drop of the plain
  intersection sum; re-adds may draw from the support matching; when M_c
  falls a (1+eps) factor behind the average of the other two, the output
  switches to the largest matching at a cost of one full rescan, giving
  (3/2 + eps)-approximate output sizes in O(1/eps) amortized work.
"""

from fractions import Fraction

from matchkit.errors import InputError
from matchkit.generators import SplitMix64
from matchkit.graphcore import ArrivalSequence, MultiMatchingState


class IncrementalMCM:
    """Driver for the randomized three-matching incremental engine."""

    K = 3

    def __init__(self):
        self.core = MultiMatchingState(3)

    @classmethod
    def run(cls, seq: ArrivalSequence) -> "IncrementalMCM":
        alg = cls()
        for e in seq.edges:
            alg.core.process_incremental3(e.u, e.v)
        return alg

    def process_edge(self, u: int, v: int) -> int:
        return self.core.process_incremental3(u, v)

    @property
    def sizes(self):
        return list(self.core.sizes)

    def expected_size(self) -> Fraction:
        return Fraction(sum(self.core.sizes), 3)

    def sampled_size(self, seed: int):
        l = SplitMix64(seed).randrange(3)
        return l, self.core.sizes[l]

    @property
    def work_max(self):
        return self.core.work_max

    @property
    def work_total(self):
        return self.core.work_total


def _as_eps_fraction(eps) -> Fraction:
    if isinstance(eps, tuple):
        eps = Fraction(*eps)
    eps = Fraction(eps)
    if not 0 < eps <= Fraction(1, 2):
        raise InputError("eps must lie in (0, 1/2], got %s" % eps)
    return eps


class DeterministicIncrementalMCM:
    """Driver for the deterministic engine with support matching M_4."""

    def __init__(self, eps):
        self.eps = _as_eps_fraction(eps)
        self.core = MultiMatchingState(
            4, eps_num=self.eps.numerator, eps_den=self.eps.denominator
        )

    @classmethod
    def run(cls, seq: ArrivalSequence, eps) -> "DeterministicIncrementalMCM":
        alg = cls(eps)
        for e in seq.edges:
            alg.core.process_incremental_det(e.u, e.v)
        return alg

    def process_edge(self, u: int, v: int) -> int:
        return self.core.process_incremental_det(u, v)

    @property
    def sizes(self):
        """Sizes of M_1..M_3 (the support matching is not an output)."""
        return list(self.core.sizes[:3])

    @property
    def support_size(self):
        return self.core.sizes[3]

    @property
    def current_index(self):
        return self.core.cur

    @property
    def current_size(self):
        return self.core.sizes[self.core.cur]

    def output_members(self):
        return self.core.members(self.core.cur)

    @property
    def changecurr_count(self):
        return self.core.changecurr_count

    @property
    def work_max(self):
        return self.core.work_max

    @property
    def work_total(self):
        return self.core.work_total

    def current_ok(self) -> bool:
        """The defining guarantee of the current output: never more than a
        2(1+eps) factor below the sum of the other two matchings' sizes."""
        s = self.core.sizes
        c = self.core.cur
        other = s[0] + s[1] + s[2] - s[c]
        return s[c] * 2 * (self.eps.denominator + self.eps.numerator) >= (
            other * self.eps.denominator
        )
