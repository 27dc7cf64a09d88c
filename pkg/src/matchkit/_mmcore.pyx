# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels: multi-matching update engines, forest DP, dual scans.

This is the compiled twin of ``_mmcore_py``; that module is the reference.
The two are kept in lockstep deliberately — same iteration orders, same
tie-breaking, same work-unit accounting, same event logs — so the parity
test suite can compare full state digests between them.  Container
attributes (``eu``, ``mask``, ``sizes``, ...) are exposed as properties
returning fresh lists; callers snapshot them once rather than indexing
per element.
"""

from libcpp.vector cimport vector

from matchkit.errors import CyclicGraphError, InvariantError

AUGMENT_ADD = 0
SWITCH_IN = 1
SWITCH_OUT = 2
READD = 4
SUPPORT_ADD = 3


cdef class MultiMatchingCore:
    """State of k simultaneous matchings over a streamed simple graph."""

    cdef public long k
    cdef public long eps_num
    cdef public long eps_den
    cdef public long nv
    cdef vector[long] _eu
    cdef vector[long] _ev
    cdef vector[long] _mask
    cdef vector[vector[long]] _matched
    cdef vector[long] _sizes
    cdef vector[long] _inter  # k*k, row-major
    cdef public list events
    cdef public long work_total
    cdef public long work_last
    cdef public long work_max
    cdef public long updates
    cdef public long cur
    cdef public long changecurr_count

    def __init__(self, long k, long eps_num=0, long eps_den=1):
        self.k = k
        self.eps_num = eps_num
        self.eps_den = eps_den
        self.nv = 0
        self._matched.resize(k)
        self._sizes.assign(k, 0)
        self._inter.assign(k * k, 0)
        self.events = []
        self.work_total = 0
        self.work_last = 0
        self.work_max = 0
        self.updates = 0
        self.cur = 0
        self.changecurr_count = 0

    # -- public views (copies; snapshot once, then index) -----------------

    @property
    def eu(self):
        return [self._eu[e] for e in range(<long> self._eu.size())]

    @property
    def ev(self):
        return [self._ev[e] for e in range(<long> self._ev.size())]

    @property
    def mask(self):
        return [self._mask[e] for e in range(<long> self._mask.size())]

    @property
    def sizes(self):
        return [self._sizes[i] for i in range(self.k)]

    @property
    def matched(self):
        return [self.matched_at(i) for i in range(self.k)]

    @property
    def inter(self):
        return self.intersections()

    # -- registration -----------------------------------------------------

    def add_edge(self, long u, long v):
        cdef long need, i, eid
        if u == v:
            raise InvariantError("self-loop edge (%d, %d)" % (u, v))
        need = (u if u > v else v) + 1
        while self.nv < need:
            for i in range(self.k):
                self._matched[i].push_back(-1)
            self.nv += 1
        eid = <long> self._eu.size()
        self._eu.push_back(u)
        self._ev.push_back(v)
        self._mask.push_back(0)
        return eid

    # -- primitive mutations (work-counted, event-logged) -----------------

    cdef void _add(self, long i, long e, long action, long step):
        cdef long m = self._mask[e]
        cdef long j
        self._mask[e] = m | (1 << i)
        self._matched[i][self._eu[e]] = e
        self._matched[i][self._ev[e]] = e
        self._sizes[i] += 1
        self.work_total += 1
        for j in range(self.k):
            if j != i and (m >> j) & 1:
                self._inter[i * self.k + j] += 1
                self._inter[j * self.k + i] += 1
                self.work_total += 1
        self.events.append((e, i, action, step))

    cdef void _remove(self, long i, long e, long step):
        cdef long m, j
        self._mask[e] &= ~(1 << i)
        m = self._mask[e]
        self._matched[i][self._eu[e]] = -1
        self._matched[i][self._ev[e]] = -1
        self._sizes[i] -= 1
        self.work_total += 1
        for j in range(self.k):
            if j != i and (m >> j) & 1:
                self._inter[i * self.k + j] -= 1
                self._inter[j * self.k + i] -= 1
                self.work_total += 1
        self.events.append((e, i, SWITCH_OUT, step))

    # -- generic operations ----------------------------------------------

    def coverage(self, long e):
        cdef long u = self._eu[e]
        cdef long v = self._ev[e]
        cdef long c = 0
        cdef long i
        for i in range(self.k):
            if (self._mask[e] >> i) & 1 or self._matched[i][u] != -1 or self._matched[i][v] != -1:
                c += 1
        return c

    def apply_switch(self, long i, out_ids, long in_id):
        cdef long x, c, w, step
        if not 0 <= i < self.k:
            raise InvariantError("matching index %d out of range" % i)
        if in_id in out_ids:
            raise InvariantError("in-edge %d listed in out set" % in_id)
        for x in out_ids:
            if not (self._mask[x] >> i) & 1:
                raise InvariantError("out-edge %d not in M_%d" % (x, i + 1))
        if (self._mask[in_id] >> i) & 1:
            raise InvariantError("in-edge %d already in M_%d" % (in_id, i + 1))
        out = set(out_ids)
        for w in (self._eu[in_id], self._ev[in_id]):
            c = self._matched[i][w]
            if c != -1 and c not in out:
                raise InvariantError(
                    "in-edge %d conflicts with %d not in out set" % (in_id, c)
                )
        step = self.updates
        for x in out_ids:
            self._remove(i, x, step)
        self._add(i, in_id, SWITCH_IN, step)

    # -- per-algorithm updates -------------------------------------------

    def process_preemptive4(self, long u, long v):
        cdef long step = self.updates
        cdef long eid = self.add_edge(u, v)
        cdef long w0 = self.work_total
        cdef long i, j, a, b, qb, qa, cnt
        cdef bint allin
        for i in range(4):
            self.work_total += 2
            if self._matched[i][u] == -1 and self._matched[i][v] == -1:
                self._add(i, eid, AUGMENT_ADD, step)
        for i in range(1, 4):
            self.work_total += 1
            if (self._mask[eid] >> i) & 1:
                continue
            self.work_total += 2
            a = self._matched[i][u]
            b = self._matched[i][v]
            if a == -1 and b == -1:
                raise InvariantError("augment skipped a conflict-free matching")
            qb = 0
            qa = 0
            for j in range(4):
                if j == i:
                    continue
                allin = True
                cnt = 0
                if a != -1:
                    self.work_total += 1
                    if (self._mask[a] >> j) & 1:
                        cnt += 1
                    else:
                        allin = False
                if b != -1:
                    self.work_total += 1
                    if (self._mask[b] >> j) & 1:
                        cnt += 1
                    else:
                        allin = False
                if allin:
                    qb += self._inter[i * self.k + j]
                self.work_total += 1
                qa += self._inter[i * self.k + j] - cnt + ((self._mask[eid] >> j) & 1)
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

    def process_incremental3(self, long u, long v):
        cdef long step = self.updates
        cdef long eid = self.add_edge(u, v)
        cdef long w0 = self.work_total
        cdef long i, j, a, b, qb, qa, cnt, e2, x, c0, c, t
        cdef bint allin
        for i in range(3):
            self.work_total += 2
            if self._matched[i][u] == -1 and self._matched[i][v] == -1:
                self._add(i, eid, AUGMENT_ADD, step)
        for i in range(1, 3):
            self.work_total += 1
            if (self._mask[eid] >> i) & 1:
                continue
            self.work_total += 2
            a = self._matched[i][u]
            b = self._matched[i][v]
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
                    if (self._mask[a] >> j) & 1:
                        cnt += 1
                    else:
                        allin = False
                if b != -1:
                    self.work_total += 1
                    if (self._mask[b] >> j) & 1:
                        cnt += 1
                    else:
                        allin = False
                if allin:
                    qb += self._inter[i * self.k + j]
                self.work_total += 1
                qa += self._inter[i * self.k + j] - cnt + ((self._mask[eid] >> j) & 1)
            if qa < qb:
                if a != -1:
                    self._remove(i, a, step)
                if b != -1:
                    self._remove(i, b, step)
                self._add(i, eid, SWITCH_IN, step)
                for t in range(2):
                    e2 = a if t == 0 else b
                    if e2 == -1:
                        continue
                    x = self._ev[e2] if self._eu[e2] == u or self._eu[e2] == v else self._eu[e2]
                    c0 = -1
                    for j in range(3):
                        if j == i:
                            continue
                        self.work_total += 1
                        c = self._matched[j][x]
                        if c == -1 or c == c0:
                            continue
                        if c0 == -1:
                            c0 = c
                        self.work_total += 2
                        if self._matched[i][self._eu[c]] == -1 and self._matched[i][self._ev[c]] == -1:
                            self._add(i, c, READD, step)
        self._finish(w0)
        return eid

    def process_incremental_det(self, long u, long v):
        cdef long step = self.updates
        cdef long eid = self.add_edge(u, v)
        cdef long w0 = self.work_total
        cdef long i, j, a, b, e2, x, c, cnt_new, cnt_old, seen0, seen1
        cdef long s0, s1, s2, total, best
        for i in range(3):
            self.work_total += 2
            if self._matched[i][u] == -1 and self._matched[i][v] == -1:
                self._add(i, eid, AUGMENT_ADD, step)
        for i in range(1, 3):
            self.work_total += 1
            if (self._mask[eid] >> i) & 1:
                continue
            self.work_total += 2
            a = self._matched[i][u]
            b = self._matched[i][v]
            if a == -1 and b == -1:
                raise InvariantError("augment skipped a conflict-free matching")
            if a != -1 and b != -1:
                continue
            e2 = a if a != -1 else b
            cnt_new = 0
            cnt_old = 0
            for j in range(3):
                if j == i:
                    continue
                self.work_total += 2
                if (self._mask[eid] >> j) & 1:
                    cnt_new += 1
                if (self._mask[e2] >> j) & 1:
                    cnt_old += 1
            if cnt_old > cnt_new:
                self._remove(i, e2, step)
                self._add(i, eid, SWITCH_IN, step)
                x = self._ev[e2] if self._eu[e2] == u or self._eu[e2] == v else self._eu[e2]
                seen0 = -1
                seen1 = -1
                for j in range(4):
                    if j == i:
                        continue
                    self.work_total += 1
                    c = self._matched[j][x]
                    if c == -1 or c == seen0 or c == seen1:
                        continue
                    if seen0 == -1:
                        seen0 = c
                    else:
                        seen1 = c
                    self.work_total += 2
                    if self._matched[i][self._eu[c]] == -1 and self._matched[i][self._ev[c]] == -1:
                        self._add(i, c, READD, step)
        if self._mask[eid] & 0b111 == 0:
            self.work_total += 2
            if self._matched[3][u] == -1 and self._matched[3][v] == -1:
                self._add(3, eid, SUPPORT_ADD, step)
        s0 = self._sizes[0]
        s1 = self._sizes[1]
        s2 = self._sizes[2]
        total = s0 + s1 + s2
        if self._sizes[self.cur] * 2 * (self.eps_den + self.eps_num) < (
            total - self._sizes[self.cur]
        ) * self.eps_den:
            best = 0
            if s1 > self._sizes[best]:
                best = 1
            if s2 > self._sizes[best]:
                best = 2
            self.cur = best
            self.work_total += total
            self.changecurr_count += 1
        self._finish(w0)
        return eid

    cdef void _finish(self, long w0):
        self.work_last = self.work_total - w0
        if self.work_last > self.work_max:
            self.work_max = self.work_last
        self.updates += 1

    # -- observers --------------------------------------------------------

    def members(self, long i):
        return [e for e in range(<long> self._mask.size()) if (self._mask[e] >> i) & 1]

    def matched_at(self, long i):
        return [self._matched[i][v] for v in range(self.nv)]

    def intersections(self):
        return [
            [self._inter[i * self.k + j] for j in range(self.k)]
            for i in range(self.k)
        ]

    def maximality_deficit(self, long i):
        cdef long d = 0
        cdef long e
        for e in range(<long> self._mask.size()):
            if (
                not (self._mask[e] >> i) & 1
                and self._matched[i][self._eu[e]] == -1
                and self._matched[i][self._ev[e]] == -1
            ):
                d += 1
        return d

    def state_digest(self):
        return (
            self.nv,
            <long> self._eu.size(),
            tuple(self.mask),
            tuple(self.sizes),
            tuple(tuple(r) for r in self.intersections()),
            tuple(tuple(self.matched_at(i)) for i in range(self.k)),
            tuple(self.events),
            self.work_total,
            self.work_max,
            self.updates,
            self.cur,
            self.changecurr_count,
        )


cdef void _build_csr(
    long nv,
    vector[long] & eu,
    vector[long] & ev,
    vector[long] & off,
    vector[long] & adj_v,
    vector[long] & adj_e,
):
    cdef long m = <long> eu.size()
    cdef vector[long] deg
    cdef vector[long] pos
    cdef long e, v, u
    deg.assign(nv, 0)
    for e in range(m):
        deg[eu[e]] += 1
        deg[ev[e]] += 1
    off.assign(nv + 1, 0)
    for v in range(nv):
        off[v + 1] = off[v] + deg[v]
    pos.assign(nv, 0)
    for v in range(nv):
        pos[v] = off[v]
    adj_v.assign(2 * m, 0)
    adj_e.assign(2 * m, 0)
    for e in range(m):
        u = eu[e]
        v = ev[e]
        adj_v[pos[u]] = v
        adj_e[pos[u]] = e
        pos[u] += 1
        adj_v[pos[v]] = u
        adj_e[pos[v]] = e
        pos[v] += 1


def forest_opt(long nv, eu, ev, weights=None):
    """Maximum (cardinality or weight) matching of a forest by rooted DP."""
    cdef vector[long] ceu = eu
    cdef vector[long] cev = ev
    cdef long m = <long> ceu.size()
    cdef bint unit = weights is None
    cdef vector[double] cw
    cdef vector[long] off, adj_v, adj_e
    cdef vector[double] free_, best
    cdef vector[long] take, parent, pedge, order, stack
    cdef vector[bint] visited
    cdef double total = 0.0
    cdef double f, b_, cand, w
    cdef long root, top, cnt, x, y, t, e, te, idx, p, use, code
    cdef bint forced
    if not unit:
        cw = weights
    _build_csr(nv, ceu, cev, off, adj_v, adj_e)
    free_.assign(nv, 0.0)
    best.assign(nv, 0.0)
    take.assign(nv, -1)
    parent.assign(nv, -1)
    pedge.assign(nv, -1)
    order.assign(nv, 0)
    visited.assign(nv, False)
    wit = []
    top = 0
    for root in range(nv):
        if visited[root]:
            continue
        order[top] = root
        top += 1
        visited[root] = True
        parent[root] = -1
        pedge[root] = -1
        cnt = 0
        stack.clear()
        stack.push_back(root)
        while stack.size() > 0:
            x = stack.back()
            stack.pop_back()
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
                stack.push_back(y)
        for idx in range(cnt - 1, -1, -1):
            x = order[top - cnt + idx]
            f = free_[x]
            b_ = f
            te = -1
            for t in range(off[x], off[x + 1]):
                if adj_e[t] == pedge[x]:
                    continue
                y = adj_v[t]
                e = adj_e[t]
                w = 1.0 if unit else cw[e]
                cand = f - best[y] + free_[y] + w
                if cand > b_:
                    b_ = cand
                    te = e
            best[x] = b_
            take[x] = te
            p = parent[x]
            if p != -1:
                free_[p] += b_
        total += best[root]
        stack.clear()
        stack.push_back(root * 2)  # vertex*2 + forced-free flag
        while stack.size() > 0:
            code = stack.back()
            stack.pop_back()
            x = code >> 1
            forced = code & 1
            use = -1 if forced else take[x]
            for t in range(off[x], off[x + 1]):
                e = adj_e[t]
                if e == pedge[x]:
                    continue
                y = adj_v[t]
                if e == use:
                    wit.append(e)
                    stack.push_back(y * 2 + 1)
                else:
                    stack.push_back(y * 2)
        for idx in range(cnt):
            x = order[top - cnt + idx]
            free_[x] = 0.0
            best[x] = 0.0
    wit.sort()
    if unit:
        return int(total), wit
    return total, wit


def forest_opt_prefix(long nv, eu, ev, weights=None):
    """Optimum matching value after each arrival prefix, from scratch each
    time.  Vertices must be dense in order of first appearance."""
    cdef long m = len(eu)
    cdef long t, hi, nseen
    out = []
    nseen = 0
    for t in range(1, m + 1):
        hi = eu[t - 1] if eu[t - 1] > ev[t - 1] else ev[t - 1]
        if hi + 1 > nseen:
            nseen = hi + 1
        val, _ = forest_opt(nseen, eu[:t], ev[:t], None if weights is None else weights[:t])
        out.append(val)
    return out


cdef long _cert_component(
    long nv,
    vector[long] & eu,
    vector[long] & ev,
    vector[long] & tcnt,
    long root,
    vector[long] & off,
    vector[long] & adj_v,
    vector[long] & adj_e,
    vector[long] & y,
    vector[long] & comp,
    vector[long] & edges,
    vector[long] & pedge,
    vector[bint] & seen,
    long * min_edge,
) except -2:
    """Shared charge scan; returns min_slack and writes *min_edge."""
    cdef vector[long] stack
    cdef long x, t, e, ych, tc, s, min_slack
    comp.clear()
    comp.push_back(root)
    edges.clear()
    seen[root] = True
    stack.push_back(root)
    while stack.size() > 0:
        x = stack.back()
        stack.pop_back()
        for t in range(off[x], off[x + 1]):
            e = adj_e[t]
            if e == pedge[x]:
                continue
            ych = adj_v[t]
            if seen[ych]:
                raise CyclicGraphError("cycle through vertices %d and %d" % (x, ych))
            seen[ych] = True
            pedge[ych] = e
            comp.push_back(ych)
            edges.push_back(e)
            tc = tcnt[e]
            if tc == 1:
                y[x] += 1
            elif tc == 2:
                y[x] += 1
                y[ych] += 1
            elif tc == 3:
                y[x] += 3
            stack.push_back(ych)
    min_slack = 1 << 60
    min_edge[0] = -1
    for t in range(<long> edges.size()):
        e = edges[t]
        s = y[eu[e]] + y[ev[e]]
        if s < min_slack:
            min_slack = s
            min_edge[0] = e
    return min_slack


def tree_cert_scan_root(long nv, eu, ev, tcnt, long root):
    """Integer dual charges for root's component under the tree scheme."""
    cdef vector[long] ceu = eu
    cdef vector[long] cev = ev
    cdef vector[long] ct = tcnt
    cdef vector[long] off, adj_v, adj_e, y, comp, edges, pedge
    cdef vector[bint] seen
    cdef long min_edge = -1
    cdef long min_slack
    _build_csr(nv, ceu, cev, off, adj_v, adj_e)
    y.assign(nv, 0)
    pedge.assign(nv, -1)
    seen.assign(nv, False)
    min_slack = _cert_component(
        nv, ceu, cev, ct, root, off, adj_v, adj_e, y, comp, edges, pedge, seen, &min_edge
    )
    return (
        [y[v] for v in range(nv)],
        [comp[t] for t in range(<long> comp.size())],
        min_slack,
        min_edge,
    )


def tree_cert_scan_all_roots(long nv, eu, ev, tcnt):
    """Run the tree dual scan from every root of every component."""
    cdef vector[long] ceu = eu
    cdef vector[long] cev = ev
    cdef vector[long] ct = tcnt
    cdef vector[long] off, adj_v, adj_e, y, comp, edges, pedge
    cdef vector[bint] seen
    cdef long root, slack, t
    cdef long edge = -1
    cdef bint ok = True
    cdef long min_slack = 1 << 60
    cdef long bad_root = -1
    cdef long bad_edge = -1
    _build_csr(nv, ceu, cev, off, adj_v, adj_e)
    y.assign(nv, 0)
    pedge.assign(nv, -1)
    seen.assign(nv, False)
    for root in range(nv):
        # Every vertex serves as the root of its own component once; the
        # scratch arrays are reset to their defaults after each scan.
        slack = _cert_component(
            nv, ceu, cev, ct, root, off, adj_v, adj_e, y, comp, edges, pedge, seen, &edge
        )
        if edge != -1 and slack < min_slack:
            min_slack = slack
        if edge != -1 and slack < 2 and ok:
            ok = False
            bad_root = root
            bad_edge = edge
        for t in range(<long> comp.size()):
            y[comp[t]] = 0
            pedge[comp[t]] = -1
            seen[comp[t]] = False
    if min_slack == 1 << 60:
        min_slack = -1
    return ok, min_slack, bad_root, bad_edge
