"""Seeded instance generators: random trees, bounded-degree graphs, and the
hand-crafted adversary streams for the weighted engines.

Determinism contract: the same GenSpec always yields the identical
ArrivalSequence.  All randomness comes from splitmix64 (implemented below so
streams are reproducible across platforms and languages); sizes use simple
modulo reduction, whose bias is irrelevant at these ranges.

Size parameter conventions (documented per kind): path, star, growing_tree
and tree_any_order count edges (vertices = n+1); bounded_degree counts
vertices; the adversary kinds count stages of their weight recurrences.
"""

from dataclasses import dataclass, field

from matchkit.errors import InputError
from matchkit.graphcore import MAX_WEIGHT, ArrivalSequence

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 PRNG: 64-bit state, one mix per draw."""

    def __init__(self, seed: int):
        self._s = seed & _MASK64

    def next_u64(self) -> int:
        self._s = (self._s + 0x9E3779B97F4A7C15) & _MASK64
        z = self._s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        return self.next_u64() % n

    def uniform01(self) -> float:
        """Uniform weight in (0, 1] with 53-bit granularity."""
        return ((self.next_u64() >> 11) + 1) * (2.0**-53)

    def shuffle(self, xs) -> None:
        for i in range(len(xs) - 1, 0, -1):
            j = self.next_u64() % (i + 1)
            xs[i], xs[j] = xs[j], xs[i]


@dataclass
class GenSpec:
    """A reproducible instance recipe: kind, size, seed, extra params."""

    kind: str
    n: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    @property
    def instance_id(self) -> str:
        extra = "".join(
            "-%s%s" % (k, self.params[k]) for k in sorted(self.params)
        )
        return "%s-n%d-s%d%s" % (self.kind, self.n, self.seed, extra)

    def build(self) -> ArrivalSequence:
        return generate(self)


def generate(spec: GenSpec) -> ArrivalSequence:
    try:
        fn = GENERATORS[spec.kind]
    except KeyError:
        raise InputError(
            "unknown generator kind %r (known: %s)"
            % (spec.kind, ", ".join(sorted(GENERATORS)))
        ) from None
    return fn(spec)


def _weights(rng: SplitMix64, m: int, weighted: bool):
    if not weighted:
        return None
    return [rng.uniform01() for _ in range(m)]


def _tree_kw(weighted: bool) -> dict:
    return {"mode": "mwm" if weighted else "mcm", "tree": True}


def gen_path(spec: GenSpec) -> ArrivalSequence:
    """Path with n edges, revealed end to end."""
    if spec.n < 1:
        raise InputError("path needs n >= 1 edges")
    rng = SplitMix64(spec.seed)
    weighted = bool(spec.params.get("weighted"))
    pairs = [(i, i + 1) for i in range(spec.n)]
    return ArrivalSequence.from_pairs(
        pairs, weights=_weights(rng, spec.n, weighted), growing=True, **_tree_kw(weighted)
    )


def gen_star(spec: GenSpec) -> ArrivalSequence:
    """Star with n edges around a single center, center revealed first."""
    if spec.n < 1:
        raise InputError("star needs n >= 1 edges")
    rng = SplitMix64(spec.seed)
    weighted = bool(spec.params.get("weighted"))
    pairs = [(0, i + 1) for i in range(spec.n)]
    return ArrivalSequence.from_pairs(
        pairs, weights=_weights(rng, spec.n, weighted), growing=True, **_tree_kw(weighted)
    )


def gen_growing_tree(spec: GenSpec) -> ArrivalSequence:
    """Random attachment tree with n edges: vertex i+1 joins a uniformly
    random earlier vertex, edges arriving in construction order."""
    if spec.n < 1:
        raise InputError("growing_tree needs n >= 1 edges")
    rng = SplitMix64(spec.seed)
    weighted = bool(spec.params.get("weighted"))
    pairs = []
    for v in range(1, spec.n + 1):
        pairs.append((rng.randrange(v), v))
    return ArrivalSequence.from_pairs(
        pairs, weights=_weights(rng, spec.n, weighted), growing=True, **_tree_kw(weighted)
    )


def _prufer_decode(pruf, nv):
    deg = [1] * nv
    for s in pruf:
        deg[s] += 1
    edges = []
    ptr = 0
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for s in pruf:
        edges.append((leaf, s))
        deg[s] -= 1
        if deg[s] == 1 and s < ptr:
            leaf = s
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, nv - 1))
    return edges


def gen_tree_any_order(spec: GenSpec) -> ArrivalSequence:
    """Uniform labeled tree with n edges (Pruefer decode), arbitrary arrival
    order via a seeded shuffle."""
    if spec.n < 1:
        raise InputError("tree_any_order needs n >= 1 edges")
    rng = SplitMix64(spec.seed)
    weighted = bool(spec.params.get("weighted"))
    nv = spec.n + 1
    pruf = [rng.randrange(nv) for _ in range(nv - 2)]
    pairs = _prufer_decode(pruf, nv)
    rng.shuffle(pairs)
    return ArrivalSequence.from_pairs(
        pairs, weights=_weights(rng, spec.n, weighted), **_tree_kw(weighted)
    )


def gen_bounded_degree(spec: GenSpec) -> ArrivalSequence:
    """Random simple graph on n vertices with max degree params['maxdeg']
    (default 3), aiming for params['m'] edges (default the saturation bound
    floor(maxdeg*n/2)), random arrival order."""
    if spec.n < 2:
        raise InputError("bounded_degree needs n >= 2 vertices")
    rng = SplitMix64(spec.seed)
    maxdeg = int(spec.params.get("maxdeg", 3))
    if maxdeg < 1:
        raise InputError("maxdeg must be >= 1")
    target = int(spec.params.get("m", maxdeg * spec.n // 2))
    weighted = bool(spec.params.get("weighted"))
    deg = [0] * spec.n
    seen = set()
    pairs = []
    budget = 40 * (target + 1)
    while len(pairs) < target and budget > 0:
        budget -= 1
        u = rng.randrange(spec.n)
        v = rng.randrange(spec.n)
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen or deg[u] >= maxdeg or deg[v] >= maxdeg:
            continue
        seen.add(key)
        deg[u] += 1
        deg[v] += 1
        pairs.append(key)
    return ArrivalSequence.from_pairs(
        pairs,
        weights=_weights(rng, len(pairs), weighted),
        mode="mwm" if weighted else "mcm",
        maxdeg=maxdeg,
    )


def _check_growth(n: int, factor: float):
    if factor ** (n + 1) > MAX_WEIGHT:
        raise InputError(
            "%d stages at growth factor %g exceed the 2^52 weight cap" % (n, factor)
        )


def _caterpillar(n, delta, pendant_factor, chain_factor, last_factor):
    """Shared adversary scaffold: chain edge x_0 of weight 1; at stage i a
    pendant of weight pendant_factor*w(x_i) on the older chain vertex, then
    chain edge x_{i+1} of weight chain_factor*w(x_i)+delta; finally a chain
    edge of weight exactly last_factor*w(x_n) that ties and is rejected.

    Returns (pairs, weights).  The intended reveal order is one stream:
    x_0, y_1, x_1, ..., y_{n+1}, x_{n+1}; every edge attaches a new vertex.
    """
    pairs = [("c0", "c1")]
    weights = [1.0]
    xw = 1.0
    for i in range(n):
        pairs.append(("c%d" % i, "p%d" % (i + 1)))
        weights.append(pendant_factor * xw)
        nxt = chain_factor * xw + delta
        pairs.append(("c%d" % (i + 1), "c%d" % (i + 2)))
        weights.append(nxt)
        xw = nxt
    pairs.append(("c%d" % n, "p%d" % (n + 1)))
    weights.append(pendant_factor * xw)
    pairs.append(("c%d" % (n + 1), "c%d" % (n + 2)))
    weights.append(last_factor * xw)
    return pairs, weights


def _verify_recurrence(weights, n, pendant_factor, chain_factor, last_factor, delta):
    """Regenerate each stage's weights from the recurrence and compare
    exactly; the construction must match its defining equations bit for bit."""
    xw = weights[0]
    for i in range(n):
        if weights[1 + 2 * i] != pendant_factor * xw:
            raise InputError("pendant recurrence broken at stage %d" % i)
        if weights[2 + 2 * i] != chain_factor * xw + delta:
            raise InputError("chain recurrence broken at stage %d" % i)
        xw = weights[2 + 2 * i]
    if weights[-2] != pendant_factor * xw:
        raise InputError("final pendant recurrence broken")
    if weights[-1] != last_factor * xw:
        raise InputError("final-edge recurrence broken")


def gen_mcgregor_adversary(spec: GenSpec) -> ArrivalSequence:
    """Worst-case growing tree for the single-matching threshold rule with
    parameter gamma: each chain edge beats its predecessor by just over the
    (1+gamma) threshold, each pendant ties and is rejected."""
    gamma = float(spec.params.get("gamma", 1.0))
    delta = float(spec.params.get("delta", 1e-6))
    if gamma <= 0:
        raise InputError("gamma must be positive")
    if not 0 < delta < 1:
        raise InputError("delta must be in (0, 1)")
    if spec.n < 1:
        raise InputError("adversary needs n >= 1 stages")
    _check_growth(spec.n, 1.0 + gamma)
    f = 1.0 + gamma
    pairs, weights = _caterpillar(spec.n, delta, f, f, f)
    _verify_recurrence(weights, spec.n, f, f, f, delta)
    return ArrivalSequence.from_pairs(
        pairs, weights=weights, mode="mwm", tree=True, growing=True
    )


def gen_alg4_tight(spec: GenSpec) -> ArrivalSequence:
    """Growing tree driving the two-matching engine at p=1/3, gammas (0, 1)
    to its ratio bound of 3: pendants tie the lighter threshold, chain edges
    just beat the heavier one, the final edge ties and is rejected."""
    delta = float(spec.params.get("delta", 1e-6))
    if not 0 < delta < 1:
        raise InputError("delta must be in (0, 1)")
    if spec.n < 1:
        raise InputError("adversary needs n >= 1 stages")
    _check_growth(spec.n, 2.0)
    pairs, weights = _caterpillar(spec.n, delta, 1.0, 2.0, 1.0)
    _verify_recurrence(weights, spec.n, 1.0, 2.0, 1.0, delta)
    return ArrivalSequence.from_pairs(
        pairs, weights=weights, mode="mwm", tree=True, growing=True
    )


GENERATORS = {
    "path": gen_path,
    "star": gen_star,
    "growing_tree": gen_growing_tree,
    "tree_any_order": gen_tree_any_order,
    "bounded_degree": gen_bounded_degree,
    "mcgregor_adversary": gen_mcgregor_adversary,
    "alg4_tight": gen_alg4_tight,
}
