"""Graph and matching primitives: edges, arrival sequences, instance files.

An ArrivalSequence is the unit of input everywhere: an ordered stream of
edges over dense integer vertices (numbered in order of first appearance),
with optional structural flags (tree / growing-tree / maxdeg=d) that are
checked, not trusted.  Instance files serialize one sequence::

    p match <mcm|mwm> <n_vertices> <m_edges> [tree] [growing-tree] [maxdeg=<d>]
    e <u> <v> [<weight>]

one ``e`` line per arrival in order; weights are omitted (taken as 1) in mcm
mode.  Blank lines and lines starting with ``#`` are ignored.

MultiMatchingState (the k-matching state with pairwise intersection counters,
switch transactions, and coverage queries) is provided by the selected kernel
backend; see matchkit.backend.
"""

from typing import NamedTuple

from matchkit.backend import MultiMatchingCore
from matchkit.errors import FlagViolation, InputError, InstanceFormatError, InvariantError

MultiMatchingState = MultiMatchingCore

# Largest admissible edge weight: integer-exact range of float64 with room
# for the adversaries' geometric growth to stay exactly representable.
MAX_WEIGHT = float(2**52)

ACTION_NAMES = {
    0: "augment-add",
    1: "switch-in",
    2: "switch-out",
    3: "support-add",
    4: "readd",
}


class Edge(NamedTuple):
    id: int
    u: int
    v: int
    w: float


class Matching:
    """A single matching: member edge ids plus the vertex -> edge index."""

    def __init__(self):
        self.members = set()
        self.matched_at = {}

    @property
    def size(self):
        return len(self.members)

    def edge_at(self, v):
        return self.matched_at.get(v)

    def add(self, e: Edge):
        if e.id in self.members:
            raise InvariantError("edge %d already in matching" % e.id)
        if e.u in self.matched_at or e.v in self.matched_at:
            raise InvariantError("edge %d conflicts with a member" % e.id)
        self.members.add(e.id)
        self.matched_at[e.u] = e
        self.matched_at[e.v] = e

    def remove(self, e: Edge):
        if e.id not in self.members:
            raise InvariantError("edge %d not in matching" % e.id)
        self.members.remove(e.id)
        del self.matched_at[e.u]
        del self.matched_at[e.v]


def conflicts(m: Matching, e: Edge):
    """Ids of member edges sharing an endpoint with e (e itself excluded)."""
    out = set()
    for v in (e.u, e.v):
        c = m.matched_at.get(v)
        if c is not None and c.id != e.id:
            out.add(c.id)
    return out


class ArrivalSequence:
    """An ordered edge stream with validated structural flags.

    Vertices must be dense ints numbered in order of first appearance (use
    from_pairs to ingest arbitrary labels).  mode is "mcm" (all weights 1)
    or "mwm" (positive weights).  Flags: tree (final graph is acyclic),
    growing (every edge after the first touches exactly one seen vertex),
    maxdeg (final degree cap).  Validation runs on construction.
    """

    def __init__(self, edges, mode="mcm", tree=False, growing=False, maxdeg=None, labels=None):
        self.edges = [Edge(i, int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0)
                      if not isinstance(e, Edge) else e
                      for i, e in enumerate(edges)]
        self.mode = mode
        self.tree = tree
        self.growing = growing
        self.maxdeg = maxdeg
        nv = 0
        for e in self.edges:
            nv = max(nv, e.u + 1, e.v + 1)
        self.n_vertices = nv
        self.labels = labels if labels is not None else [str(v) for v in range(nv)]
        self.validate()

    @classmethod
    def from_pairs(cls, pairs, weights=None, **kw):
        """Build from (label, label) pairs, assigning dense ids in order of
        first appearance."""
        ids = {}
        edges = []
        labels = []
        for i, (a, b) in enumerate(pairs):
            for lab in (a, b):
                if lab not in ids:
                    ids[lab] = len(ids)
                    labels.append(str(lab))
            w = 1.0 if weights is None else float(weights[i])
            edges.append(Edge(i, ids[a], ids[b], w))
        return cls(edges, labels=labels, **kw)

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def arrays(self):
        """(n_vertices, us, vs, ws) parallel lists for the kernels."""
        return (
            self.n_vertices,
            [e.u for e in self.edges],
            [e.v for e in self.edges],
            [e.w for e in self.edges],
        )

    def validate(self):
        if self.mode not in ("mcm", "mwm"):
            raise InputError("unknown mode %r" % (self.mode,))
        if self.maxdeg is not None and self.maxdeg < 1:
            raise InputError("maxdeg must be >= 1")
        seen_pairs = set()
        next_new = 0
        deg = [0] * self.n_vertices
        uf = list(range(self.n_vertices))

        def find(x):
            while uf[x] != x:
                uf[x] = uf[uf[x]]
                x = uf[x]
            return x

        for e in self.edges:
            if e.u == e.v:
                raise InputError("self-loop at edge %d" % e.id)
            if e.u < 0 or e.v < 0:
                raise InputError("negative vertex id at edge %d" % e.id)
            key = (e.u, e.v) if e.u < e.v else (e.v, e.u)
            if key in seen_pairs:
                raise InputError("duplicate edge (%d, %d) at arrival %d" % (e.u, e.v, e.id))
            seen_pairs.add(key)
            new_here = (1 if e.u >= next_new else 0) + (1 if e.v >= next_new else 0)
            # Dense-in-order check: any vertex at or past the watermark must
            # extend it contiguously.
            for x in (e.u, e.v):
                if x >= next_new:
                    if x != next_new:
                        raise InputError(
                            "vertex %d appears before %d: ids must be dense in "
                            "first-appearance order" % (x, next_new)
                        )
                    next_new += 1
            if self.growing and e.id > 0 and new_here != 1:
                raise FlagViolation(
                    "edge %d introduces %d new vertices; a growing tree needs "
                    "exactly one" % (e.id, new_here)
                )
            if self.tree:
                ru, rv = find(e.u), find(e.v)
                if ru == rv:
                    raise FlagViolation("edge %d closes a cycle under the tree flag" % e.id)
                uf[ru] = rv
            deg[e.u] += 1
            deg[e.v] += 1
            if self.maxdeg is not None and (deg[e.u] > self.maxdeg or deg[e.v] > self.maxdeg):
                raise FlagViolation(
                    "degree exceeds maxdeg=%d at edge %d" % (self.maxdeg, e.id)
                )
            if not (e.w > 0) or e.w != e.w or e.w > MAX_WEIGHT:
                raise InputError("edge %d weight %r outside (0, 2^52]" % (e.id, e.w))
            if self.mode == "mcm" and e.w != 1.0:
                raise InputError("mcm instance has non-unit weight at edge %d" % e.id)
        if next_new != self.n_vertices:
            raise InputError("vertex ids are not dense 0..n-1")


def parse_instance(text):
    """Parse instance-file text into an ArrivalSequence.

    Raises InstanceFormatError with the offending 1-based line number.
    """
    header = None
    header_line = 0
    pairs = []
    weights = []
    edge_lines = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if tok[0] == "p":
            if header is not None:
                raise InstanceFormatError(ln, "duplicate header")
            if len(tok) < 5 or tok[1] != "match":
                raise InstanceFormatError(ln, "header must be 'p match <mode> <n> <m> [flags]'")
            mode = tok[2]
            if mode not in ("mcm", "mwm"):
                raise InstanceFormatError(ln, "mode must be mcm or mwm, got %r" % mode)
            try:
                n = int(tok[3])
                m = int(tok[4])
            except ValueError:
                raise InstanceFormatError(ln, "n and m must be integers") from None
            tree = growing = False
            maxdeg = None
            for f in tok[5:]:
                if f == "tree":
                    tree = True
                elif f == "growing-tree":
                    tree = growing = True
                elif f.startswith("maxdeg="):
                    try:
                        maxdeg = int(f.split("=", 1)[1])
                    except ValueError:
                        raise InstanceFormatError(ln, "bad flag %r" % f) from None
                else:
                    raise InstanceFormatError(ln, "unknown flag %r" % f)
            header = (mode, n, m, tree, growing, maxdeg)
            header_line = ln
        elif tok[0] == "e":
            if header is None:
                raise InstanceFormatError(ln, "edge line before header")
            if len(tok) not in (3, 4):
                raise InstanceFormatError(ln, "edge line must be 'e <u> <v> [<w>]'")
            if tok[1] == tok[2]:
                raise InstanceFormatError(ln, "self-loop edge")
            w = 1.0
            if len(tok) == 4:
                try:
                    w = float(tok[3])
                except ValueError:
                    raise InstanceFormatError(ln, "bad weight %r" % tok[3]) from None
            pairs.append((tok[1], tok[2]))
            weights.append(w)
            edge_lines.append(ln)
        else:
            raise InstanceFormatError(ln, "unknown record %r" % tok[0])
    if header is None:
        raise InstanceFormatError(1, "missing 'p match' header")
    mode, n, m, tree, growing, maxdeg = header
    if len(pairs) != m:
        raise InstanceFormatError(
            header_line, "header declares %d edges but %d edge lines found" % (m, len(pairs))
        )
    try:
        seq = ArrivalSequence.from_pairs(
            pairs, weights=weights, mode=mode, tree=tree, growing=growing, maxdeg=maxdeg
        )
    except InputError as exc:
        if isinstance(exc, InstanceFormatError):
            raise
        raise InstanceFormatError(header_line, str(exc)) from exc
    if seq.n_vertices != n:
        raise InstanceFormatError(
            header_line,
            "header declares %d vertices but %d distinct labels found" % (n, seq.n_vertices),
        )
    return seq


def format_instance(seq: ArrivalSequence):
    """Serialize an ArrivalSequence as instance-file text."""
    flags = []
    if seq.growing:
        flags.append("growing-tree")
    elif seq.tree:
        flags.append("tree")
    if seq.maxdeg is not None:
        flags.append("maxdeg=%d" % seq.maxdeg)
    head = "p match %s %d %d" % (seq.mode, seq.n_vertices, len(seq.edges))
    if flags:
        head += " " + " ".join(flags)
    lines = [head]
    for e in seq.edges:
        lu = seq.labels[e.u]
        lv = seq.labels[e.v]
        if seq.mode == "mcm":
            lines.append("e %s %s" % (lu, lv))
        else:
            lines.append("e %s %s %s" % (lu, lv, repr(e.w)))
    return "\n".join(lines) + "\n"


def read_instance(path):
    with open(path, "r", encoding="ascii") as fh:
        return parse_instance(fh.read())


def write_instance(path, seq):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_instance(seq))


def replay_events(events, n_matchings):
    """Reapply an event log to empty matchings; returns member-id sets.

    Used to confirm a log reproduces the final state: add actions insert the
    edge into the named matching, switch-out removes it.
    """
    mem = [set() for _ in range(n_matchings)]
    for eid, i, action, _step in events:
        if action == 2:  # switch-out
            mem[i].discard(eid)
        else:
            mem[i].add(eid)
    return mem
