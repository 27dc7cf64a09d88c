"""Pure-Python kernels: multi-matching update engines, forest DP, dual scans.

This module is the reference implementation of every hot kernel.  A compiled
twin with identical observable behaviour lives in ``_mmcore.pyx``; the two are
kept in lockstep deliberately (same iteration orders, same tie-breaking, same
work-unit accounting) so that the parity test suite can compare full state
digests, event logs, and work counters between them.  ``matchkit.backend``
selects whichever is available at import time.

Work-unit discipline (identical in both twins): one unit per matched-at probe
during conflict detection, one per edge-membership bit probe during switching
gains and re-adds, one per edge added to or removed from a matching, one per
pairwise-intersection counter update, and |M_1|+|M_2|+|M_3| units per rescan
of the current-output matching.  The counters exist so update-cost bounds can
be asserted as frozen regression constants independent of wall-clock noise.
"""

from matchkit.errors import CyclicGraphError, InvariantError

# Event-log action codes (graphcore.ACTION_NAMES maps them to strings).
AUGMENT_ADD = 0
SWITCH_IN = 1
SWITCH_OUT = 2
SUPPORT_ADD = 3
READD = 4


class MultiMatchingCore:
    """State of k simultaneous matchings over a streamed simple graph.

    Vertices are dense non-negative ints; edges get consecutive ids in
    arrival order.  The per-algorithm ``process_*`` methods implement one
    update each; ``add_edge`` merely registers an edge so the generic
    operations (``apply_switch``, ``coverage``) can also be driven directly.
    """

    def __init__(self, k, eps_num=0, eps_den=1):
        self.k = k
        self.eps_num = eps_num
        self.eps_den = eps_den
        self.nv = 0
        self.eu = []
        self.ev = []
        self.mask = []  # per edge: bitmask of matchings containing it
        self.matched = [[] for _ in range(k)]  # per matching: vertex -> eid or -1
        self.sizes = [0] * k
        self.inter = [[0] * k for _ in range(k)]  # pairwise |M_i cap M_j|
        self.events = []  # (eid, matching, action, arrival step)
        self.work_total = 0
        self.work_last = 0
        self.work_max = 0
        self.updates = 0
        self.cur = 0  # current output index (three-matching deterministic engine)
        self.changecurr_count = 0

    # -- registration -----------------------------------------------------

    def add_edge(self, u, v):
        """Register edge (u, v), growing vertex tables; returns the edge id."""
        if u == v:
            raise InvariantError("self-loop edge (%d, %d)" % (u, v))
        need = (u if u > v else v) + 1
        while self.nv < need:
            for i in range(self.k):
                self.matched[i].append(-1)
            self.nv += 1
        eid = len(self.eu)
        self.eu.append(u)
        self.ev.append(v)
        self.mask.append(0)
        return eid

    # -- primitive mutations (work-counted, event-logged) -----------------

    def _add(self, i, e, action, step):
        m = self.mask[e]
        self.mask[e] = m | (1 << i)
        self.matched[i][self.eu[e]] = e
        self.matched[i][self.ev[e]] = e
        self.sizes[i] += 1
        self.work_total += 1
        for j in range(self.k):
            if j != i and (m >> j) & 1:
                self.inter[i][j] += 1
                self.inter[j][i] += 1
                self.work_total += 1
        self.events.append((e, i, action, step))

    def _remove(self, i, e, step):
        self.mask[e] &= ~(1 << i)
        m = self.mask[e]
        self.matched[i][self.eu[e]] = -1
        self.matched[i][self.ev[e]] = -1
        self.sizes[i] -= 1
        self.work_total += 1
        for j in range(self.k):
            if j != i and (m >> j) & 1:
                self.inter[i][j] -= 1
                self.inter[j][i] -= 1
                self.work_total += 1
        self.events.append((e, i, SWITCH_OUT, step))

    # -- generic operations ----------------------------------------------

    def coverage(self, e):
        """Number of matchings covering e: member of, or adjacent to a member."""
        u = self.eu[e]
        v = self.ev[e]
        c = 0
        for i in range(self.k):
            if (self.mask[e] >> i) & 1 or self.matched[i][u] != -1 or self.matched[i][v] != -1:
                c += 1
        return c

    def apply_switch(self, i, out_ids, in_id):
        """Transactional switch on M_i: remove out_ids, then add in_id.

        Rejects (without mutating) any request whose post-state would break
        the matching invariant: an out edge not in M_i, in_id already in M_i,
        or a conflict of in_id that is not removed.
        """
        if not 0 <= i < self.k:
            raise InvariantError("matching index %d out of range" % i)
        if in_id in out_ids:
            raise InvariantError("in-edge %d listed in out set" % in_id)
        for x in out_ids:
            if not (self.mask[x] >> i) & 1:
                raise InvariantError("out-edge %d not in M_%d" % (x, i + 1))
        if (self.mask[in_id] >> i) & 1:
            raise InvariantError("in-edge %d already in M_%d" % (in_id, i + 1))
        out = set(out_ids)
        for w in (self.eu[in_id], self.ev[in_id]):
            c = self.matched[i][w]
            if c != -1 and c not in out:
                raise InvariantError(
                    "in-edge %d conflicts with %d not in out set" % (in_id, c)
                )
        step = self.updates
        for x in out_ids:
            self._remove(i, x, step)
        self._add(i, in_id, SWITCH_IN, step)

    # -- per-algorithm updates -------------------------------------------

    def process_preemptive4(self, u, v):
        """One update of the four-matching preemptive engine (k must be 4)."""
        step = self.updates
        eid = self.add_edge(u, v)
        w0 = self.work_total
        mask = self.mask
        inter = self.inter
        # Augment: e joins every matching with no adjacent member.
        for i in range(4):
            mi = self.matched[i]
            self.work_total += 2
            if mi[u] == -1 and mi[v] == -1:
                self._add(i, eid, AUGMENT_ADD, step)
        # Switching, in index order, for every matching e did not join.
        for i in (1, 2, 3):
            self.work_total += 1
            if (mask[eid] >> i) & 1:
                continue
            mi = self.matched[i]
            self.work_total += 2
            a = mi[u]
            b = mi[v]
            if a == -1 and b == -1:
                raise InvariantError("augment skipped a conflict-free matching")
            # Q before: intersections with the matchings containing every
            # conflicting edge; Q after: plain intersection sum once the
            # conflicts are replaced by e (e's own conflicts are then empty,
            # so every other matching qualifies).
            qb = 0
            qa = 0
            for j in range(4):
                if j == i:
                    continue
                allin = True
                cnt = 0
                if a != -1:
                    self.work_total += 1
                    if (mask[a] >> j) & 1:
                        cnt += 1
                    else:
                        allin = False
                if b != -1:
                    self.work_total += 1
                    if (mask[b] >> j) & 1:
                        cnt += 1
                    else:
                        allin = False
                if allin:
                    qb += inter[i][j]
                self.work_total += 1
                qa += inter[i][j] - cnt + ((mask[eid] >> j) & 1)
            if qa < qb:
                if a != -1:
                    self._remove(i, a, step)
                if b != -1:
                    self._remove(i, b, step)
                self._add(i, eid, SWITCH_IN, step)
        if self.coverage(eid) != 4:
            raise InvariantError("new edge covered by %d < 4 matchings" % self.coverage(eid))
        self._finish(w0)
        return eid

    def process_incremental3(self, u, v):
        """One update of the three-matching randomized incremental engine."""
        step = self.updates
        eid = self.add_edge(u, v)
        w0 = self.work_total
        mask = self.mask
        inter = self.inter
        for i in range(3):
            mi = self.matched[i]
            self.work_total += 2
            if mi[u] == -1 and mi[v] == -1:
                self._add(i, eid, AUGMENT_ADD, step)
        for i in (1, 2):
            self.work_total += 1
            if (mask[eid] >> i) & 1:
                continue
            mi = self.matched[i]
            self.work_total += 2
            a = mi[u]
            b = mi[v]
            if a == -1 and b == -1:
                raise InvariantError("augment skipped a conflict-free matching")
            qb = 0
            qa = 0
            for j in range(3):
                if j == i:
                    continue
                allin = True
                cnt = 0
                if a != -1:
                    self.work_total += 1
                    if (mask[a] >> j) & 1:
                        cnt += 1
                    else:
                        allin = False
                if b != -1:
                    self.work_total += 1
                    if (mask[b] >> j) & 1:
                        cnt += 1
                    else:
                        allin = False
                if allin:
                    qb += inter[i][j]
                self.work_total += 1
                qa += inter[i][j] - cnt + ((mask[eid] >> j) & 1)
            if qa < qb:
                if a != -1:
                    self._remove(i, a, step)
                if b != -1:
                    self._remove(i, b, step)
                self._add(i, eid, SWITCH_IN, step)
                # Re-add: each discarded edge frees one far endpoint; edges
                # matched there in the other matchings rejoin M_i if free.
                for e2 in (a, b):
                    if e2 == -1:
                        continue
                    x = self.ev[e2] if self.eu[e2] == u or self.eu[e2] == v else self.eu[e2]
                    c0 = -1
                    for j in range(3):
                        if j == i:
                            continue
                        self.work_total += 1
                        c = self.matched[j][x]
                        if c == -1 or c == c0:
                            continue
                        if c0 == -1:
                            c0 = c
                        self.work_total += 2
                        if mi[self.eu[c]] == -1 and mi[self.ev[c]] == -1:
                            self._add(i, c, READD, step)
        self._finish(w0)
        return eid

    def process_incremental_det(self, u, v):
        """One update of the deterministic engine: three matchings plus the
        index-3 support matching, then a current-output rescan (k must be 4).
        """
        step = self.updates
        eid = self.add_edge(u, v)
        w0 = self.work_total
        mask = self.mask
        for i in range(3):
            mi = self.matched[i]
            self.work_total += 2
            if mi[u] == -1 and mi[v] == -1:
                self._add(i, eid, AUGMENT_ADD, step)
        for i in (1, 2):
            self.work_total += 1
            if (mask[eid] >> i) & 1:
                continue
            mi = self.matched[i]
            self.work_total += 2
            a = mi[u]
            b = mi[v]
            if a == -1 and b == -1:
                raise InvariantError("augment skipped a conflict-free matching")
            if a != -1 and b != -1:
                continue  # switch only when exactly one edge conflicts
            e2 = a if a != -1 else b
            cnt_new = 0
            cnt_old = 0
            for j in range(3):
                if j == i:
                    continue
                self.work_total += 2
                if (mask[eid] >> j) & 1:
                    cnt_new += 1
                if (mask[e2] >> j) & 1:
                    cnt_old += 1
            if cnt_old > cnt_new:
                self._remove(i, e2, step)
                self._add(i, eid, SWITCH_IN, step)
                x = self.ev[e2] if self.eu[e2] == u or self.eu[e2] == v else self.eu[e2]
                seen0 = -1
                seen1 = -1
                for j in range(4):
                    if j == i:
                        continue
                    self.work_total += 1
                    c = self.matched[j][x]
                    if c == -1 or c == seen0 or c == seen1:
                        continue
                    if seen0 == -1:
                        seen0 = c
                    else:
                        seen1 = c
                    self.work_total += 2
                    if mi[self.eu[c]] == -1 and mi[self.ev[c]] == -1:
                        self._add(i, c, READD, step)
        # Support: an edge that joined nothing backs up the others in M_4.
        if mask[eid] & 0b111 == 0:
            m3 = self.matched[3]
            self.work_total += 2
            if m3[u] == -1 and m3[v] == -1:
                self._add(3, eid, SUPPORT_ADD, step)
        # Current-output rescan: switch to the largest matching (lowest index
        # on ties) when |M_c| falls below (|M_i|+|M_j|)/(2(1+eps)); compared
        # exactly with eps = num/den via cross-multiplication.
        s0 = self.sizes[0]
        s1 = self.sizes[1]
        s2 = self.sizes[2]
        total = s0 + s1 + s2
        if self.sizes[self.cur] * 2 * (self.eps_den + self.eps_num) < (
            total - self.sizes[self.cur]
        ) * self.eps_den:
            best = 0
            if s1 > self.sizes[best]:
                best = 1
            if s2 > self.sizes[best]:
                best = 2
            self.cur = best
            self.work_total += total
            self.changecurr_count += 1
        self._finish(w0)
        return eid

    def _finish(self, w0):
        self.work_last = self.work_total - w0
        if self.work_last > self.work_max:
            self.work_max = self.work_last
        self.updates += 1

    # -- observers --------------------------------------------------------

    def members(self, i):
        return [e for e in range(len(self.mask)) if (self.mask[e] >> i) & 1]

    def matched_at(self, i):
        return list(self.matched[i])

    def intersections(self):
        return [list(row) for row in self.inter]

    def maximality_deficit(self, i):
        """Edges addable to M_i without conflict (0 means M_i is maximal)."""
        mi = self.matched[i]
        d = 0
        for e in range(len(self.mask)):
            if not (self.mask[e] >> i) & 1 and mi[self.eu[e]] == -1 and mi[self.ev[e]] == -1:
                d += 1
        return d

    def state_digest(self):
        """Hashable full-state summary used by the backend parity tests."""
        return (
            self.nv,
            len(self.eu),
            tuple(self.mask),
            tuple(self.sizes),
            tuple(tuple(r) for r in self.inter),
            tuple(tuple(self.matched[i]) for i in range(self.k)),
            tuple(self.events),
            self.work_total,
            self.work_max,
            self.updates,
            self.cur,
            self.changecurr_count,
        )


def forest_opt(nv, eu, ev, weights=None):
    """Maximum (cardinality or weight) matching of a forest by rooted DP.

    Returns (value, witness) where witness is a list of edge ids forming an
    optimum matching.  Unweighted values are exact ints.  Raises
    CyclicGraphError if the input is not a forest.
    """
    m = len(eu)
    # CSR adjacency.
    deg = [0] * nv
    for e in range(m):
        deg[eu[e]] += 1
        deg[ev[e]] += 1
    off = [0] * (nv + 1)
    for v in range(nv):
        off[v + 1] = off[v] + deg[v]
    pos = list(off[:nv])
    adj_v = [0] * (2 * m)
    adj_e = [0] * (2 * m)
    for e in range(m):
        u = eu[e]
        v = ev[e]
        adj_v[pos[u]] = v
        adj_e[pos[u]] = e
        pos[u] += 1
        adj_v[pos[v]] = u
        adj_e[pos[v]] = e
        pos[v] += 1

    unit = weights is None
    free = [0] * nv  # best value of subtree with the vertex left exposed
    best = [0] * nv  # best value of subtree overall
    take = [-1] * nv  # edge to the child matched with the vertex, if better
    parent = [-1] * nv
    pedge = [-1] * nv
    order = [0] * nv
    visited = [False] * nv
    total = 0
    wit = []
    for root in range(nv):
        if visited[root]:
            continue
        # Iterative DFS collecting a preorder of the component.
        top = 0
        order[top] = root
        top += 1
        visited[root] = True
        parent[root] = -1
        pedge[root] = -1
        cnt = 0
        stack = [root]
        while stack:
            x = stack.pop()
            cnt += 1
            for t in range(off[x], off[x + 1]):
                y = adj_v[t]
                if adj_e[t] == pedge[x]:
                    continue
                if visited[y]:
                    raise CyclicGraphError("cycle through vertices %d and %d" % (x, y))
                visited[y] = True
                parent[y] = x
                pedge[y] = adj_e[t]
                order[top] = y
                top += 1
                stack.append(y)
        comp = order[top - cnt : top]
        # Post-order accumulation: children precede parents in reverse preorder.
        for idx in range(cnt - 1, -1, -1):
            x = comp[idx]
            f = free[x]
            b = f
            te = -1
            for t in range(off[x], off[x + 1]):
                if adj_e[t] == pedge[x]:
                    continue
                y = adj_v[t]
                e = adj_e[t]
                w = 1 if unit else weights[e]
                cand = f - best[y] + free[y] + w
                if cand > b:
                    b = cand
                    te = e
            best[x] = b
            take[x] = te
            p = parent[x]
            if p != -1:
                free[p] += b
        total += best[root]
        # Reconstruct one optimum matching top-down.
        stack = [(root, False)]
        while stack:
            x, forced = stack.pop()
            use = -1 if forced else take[x]
            for t in range(off[x], off[x + 1]):
                e = adj_e[t]
                if e == pedge[x]:
                    continue
                y = adj_v[t]
                if e == use:
                    wit.append(e)
                    stack.append((y, True))
                else:
                    stack.append((y, False))
        for x in comp:
            free[x] = 0
            best[x] = 0
    wit.sort()
    return total, wit


def forest_opt_prefix(nv, eu, ev, weights=None):
    """Optimum matching value after each arrival prefix, from scratch each
    time.  Vertices must be dense in order of first appearance, so prefix t
    spans exactly vertices 0..max(eu[:t], ev[:t]).
    """
    m = len(eu)
    out = []
    nseen = 0
    for t in range(1, m + 1):
        hi = eu[t - 1] if eu[t - 1] > ev[t - 1] else ev[t - 1]
        if hi + 1 > nseen:
            nseen = hi + 1
        val, _ = forest_opt(nseen, eu[:t], ev[:t], None if weights is None else weights[:t])
        out.append(val)
    return out


def tree_cert_scan_root(nv, eu, ev, tcnt, root):
    """Integer dual charges for root's component under the tree scheme.

    Each edge in t matchings charges, along the orientation toward the root:
    t=1 one unit to its parent endpoint, t=2 one to each endpoint, t=3 three
    to the parent endpoint.  Returns (y, comp, min_slack, min_edge) where y
    maps vertices of the component (others 0), comp lists its vertices, and
    min_slack is the smallest y_u + y_v over component edges (threshold 2).
    """
    deg = [0] * nv
    m = len(eu)
    for e in range(m):
        deg[eu[e]] += 1
        deg[ev[e]] += 1
    off = [0] * (nv + 1)
    for v in range(nv):
        off[v + 1] = off[v] + deg[v]
    pos = list(off[:nv])
    adj_v = [0] * (2 * m)
    adj_e = [0] * (2 * m)
    for e in range(m):
        u = eu[e]
        v = ev[e]
        adj_v[pos[u]] = v
        adj_e[pos[u]] = e
        pos[u] += 1
        adj_v[pos[v]] = u
        adj_e[pos[v]] = e
        pos[v] += 1
    return _cert_component(nv, eu, ev, tcnt, root, off, adj_v, adj_e)


def _cert_component(nv, eu, ev, tcnt, root, off, adj_v, adj_e):
    y = [0] * nv
    pedge = [-1] * nv
    comp = [root]
    seen = [False] * nv
    seen[root] = True
    stack = [root]
    edges = []
    while stack:
        x = stack.pop()
        for t in range(off[x], off[x + 1]):
            e = adj_e[t]
            if e == pedge[x]:
                continue
            ych = adj_v[t]
            if seen[ych]:
                raise CyclicGraphError("cycle through vertices %d and %d" % (x, ych))
            seen[ych] = True
            pedge[ych] = e
            comp.append(ych)
            edges.append(e)
            # x is the parent endpoint of e, ych the child endpoint.
            tc = tcnt[e]
            if tc == 1:
                y[x] += 1
            elif tc == 2:
                y[x] += 1
                y[ych] += 1
            elif tc == 3:
                y[x] += 3
            stack.append(ych)
    min_slack = 1 << 60
    min_edge = -1
    for e in edges:
        s = y[eu[e]] + y[ev[e]]
        if s < min_slack:
            min_slack = s
            min_edge = e
    return y, comp, min_slack, min_edge


def tree_cert_scan_all_roots(nv, eu, ev, tcnt):
    """Run the tree dual scan from every root of every component.

    Returns (ok, min_slack, bad_root, bad_edge): ok iff for every root choice
    each component edge's endpoint charges sum to >= 2; min_slack is the
    global minimum and (bad_root, bad_edge) witness the first failure (-1/-1
    when none).
    """
    deg = [0] * nv
    m = len(eu)
    for e in range(m):
        deg[eu[e]] += 1
        deg[ev[e]] += 1
    off = [0] * (nv + 1)
    for v in range(nv):
        off[v + 1] = off[v] + deg[v]
    pos = list(off[:nv])
    adj_v = [0] * (2 * m)
    adj_e = [0] * (2 * m)
    for e in range(m):
        u = eu[e]
        v = ev[e]
        adj_v[pos[u]] = v
        adj_e[pos[u]] = e
        pos[u] += 1
        adj_v[pos[v]] = u
        adj_e[pos[v]] = e
        pos[v] += 1
    ok = True
    min_slack = 1 << 60
    bad_root = -1
    bad_edge = -1
    for root in range(nv):
        # Every vertex serves as the root of its own component once.
        _, _, slack, edge = _cert_component(nv, eu, ev, tcnt, root, off, adj_v, adj_e)
        if edge != -1 and slack < min_slack:
            min_slack = slack
        if edge != -1 and slack < 2 and ok:
            ok = False
            bad_root = root
            bad_edge = edge
    if min_slack == 1 << 60:
        min_slack = -1  # no edges anywhere
    return ok, min_slack, bad_root, bad_edge
