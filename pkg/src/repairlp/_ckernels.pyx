# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; same algorithms and results as ``_pykernels``."""

from libc.stdlib cimport malloc, free, calloc
from libc.string cimport memcpy

cdef enum:
    UNK = 0
    TRUE = 1
    FALSE = 2


cdef class _Prog:
    cdef int n, nr
    cdef int[:] comp, hs, hd, ps, pd, ns, nd, ohs, ohd, ops, opd, ons, ond

    def __init__(self, enc):
        self.n = enc.n
        self.nr = enc.nr
        self.comp = enc.comp
        self.hs = enc.hs
        self.hd = enc.hd
        self.ps = enc.ps
        self.pd = enc.pd
        self.ns = enc.ns
        self.nd = enc.nd
        self.ohs = enc.ohs
        self.ohd = enc.ohd
        self.ops = enc.ops
        self.opd = enc.opd
        self.ons = enc.ons
        self.ond = enc.ond


def well_founded(enc):
    """Return ``(val, entered, consistent)`` for the well-founded fixpoint."""
    cdef _Prog p = _Prog(enc)
    cdef int n = p.n, nr = p.nr
    cdef int i, j, r, r2, t, h, k = 0, c, cand, open_heads, qlen, nt
    cdef bint ok, u, changed, consistent = True
    cdef int *val = <int *> calloc(n + 1, sizeof(int))
    cdef int *entered = <int *> calloc(n + 1, sizeof(int))
    cdef int *new_true = <int *> malloc((nr + 1) * sizeof(int))
    cdef char *in_x = <char *> malloc(n + 1)
    cdef int *cnt = <int *> malloc((nr + 1) * sizeof(int))
    cdef char *usable = <char *> malloc(nr + 1)
    cdef int *queue = <int *> malloc((nr + 1) * sizeof(int))
    cdef char *queued = <char *> malloc(nr + 1)
    try:
        while True:
            k += 1
            nt = 0
            for r in range(nr):
                if p.hs[r] == p.hs[r + 1]:
                    continue
                ok = True
                for j in range(p.ps[r], p.ps[r + 1]):
                    if val[p.pd[j]] != TRUE:
                        ok = False
                        break
                if ok:
                    for j in range(p.ns[r], p.ns[r + 1]):
                        if val[p.nd[j]] != FALSE:
                            ok = False
                            break
                if not ok:
                    continue
                cand = -1
                open_heads = 0
                for j in range(p.hs[r], p.hs[r + 1]):
                    if val[p.hd[j]] != FALSE:
                        open_heads += 1
                        cand = p.hd[j]
                if open_heads == 1 and val[cand] == UNK:
                    new_true[nt] = cand
                    nt += 1
            for i in range(n):
                in_x[i] = val[i] != TRUE
            qlen = 0
            for r in range(nr):
                queued[r] = 0
                usable[r] = 0
                cnt[r] = 0
                if p.hs[r] == p.hs[r + 1]:
                    continue
                u = True
                for j in range(p.ns[r], p.ns[r + 1]):
                    if val[p.nd[j]] == TRUE:
                        u = False
                        break
                if u:
                    for j in range(p.hs[r], p.hs[r + 1]):
                        if val[p.hd[j]] == TRUE:
                            u = False
                            break
                if u:
                    for j in range(p.ps[r], p.ps[r + 1]):
                        if val[p.pd[j]] == FALSE:
                            u = False
                            break
                usable[r] = u
                c = 0
                for j in range(p.ps[r], p.ps[r + 1]):
                    if in_x[p.pd[j]]:
                        c += 1
                cnt[r] = c
                if u and c == 0:
                    queue[qlen] = r
                    qlen += 1
                    queued[r] = 1
            while qlen > 0:
                qlen -= 1
                r = queue[qlen]
                for j in range(p.hs[r], p.hs[r + 1]):
                    h = p.hd[j]
                    if in_x[h]:
                        in_x[h] = 0
                        for t in range(p.ops[h], p.ops[h + 1]):
                            r2 = p.opd[t]
                            cnt[r2] -= 1
                            if cnt[r2] == 0 and usable[r2] and not queued[r2]:
                                queue[qlen] = r2
                                qlen += 1
                                queued[r2] = 1
            changed = False
            for j in range(nt):
                i = new_true[j]
                if val[i] == UNK:
                    val[i] = TRUE
                    entered[i] = k
                    changed = True
            for i in range(n):
                if in_x[i] and val[i] == UNK:
                    val[i] = FALSE
                    entered[i] = k
                    changed = True
            if not changed:
                break
        for i in range(n):
            if val[i] == TRUE and val[p.comp[i]] == TRUE:
                consistent = False
        return [val[i] for i in range(n)], [entered[i] for i in range(n)], consistent
    finally:
        free(val)
        free(entered)
        free(new_true)
        free(in_x)
        free(cnt)
        free(usable)
        free(queue)
        free(queued)


cdef class _Search:
    cdef _Prog p
    cdef object enc
    cdef int n, nr
    cdef int *val
    cdef int *trail
    cdef int tlen
    cdef int *queue
    cdef int qlen
    cdef long max_branches, branches
    cdef int limit
    cdef bint exceeded
    cdef list models

    def __cinit__(self, enc, init, long max_branches, int limit):
        self.p = _Prog(enc)
        self.enc = enc
        self.n = self.p.n
        self.nr = self.p.nr
        self.val = <int *> calloc(self.n + 1, sizeof(int))
        self.trail = <int *> malloc((self.n + 1) * sizeof(int))
        # a literal is queued at most once per assignment
        self.queue = <int *> malloc((self.n + 1) * sizeof(int))
        self.tlen = 0
        self.qlen = 0
        cdef int i
        for i in range(self.n):
            self.val[i] = init[i]
        self.max_branches = max_branches
        self.limit = limit
        self.branches = 0
        self.exceeded = False
        self.models = []

    def __dealloc__(self):
        free(self.val)
        free(self.trail)
        free(self.queue)

    cdef inline bint assign(self, int i, int v):
        cdef int cur = self.val[i]
        if cur == v:
            return True
        if cur != UNK:
            return False
        self.val[i] = v
        self.trail[self.tlen] = i
        self.tlen += 1
        self.queue[self.qlen] = i
        self.qlen += 1
        return True

    cdef inline bint body_false(self, int r):
        cdef int j
        for j in range(self.p.ps[r], self.p.ps[r + 1]):
            if self.val[self.p.pd[j]] == FALSE:
                return True
        for j in range(self.p.ns[r], self.p.ns[r + 1]):
            if self.val[self.p.nd[j]] == TRUE:
                return True
        return False

    cdef bint check_rule(self, int r):
        cdef int j, v, unk_body = 0, last_p = -1, last_n = -1, unk_heads = 0, last_h = -1
        if self.body_false(r):
            return True
        for j in range(self.p.ps[r], self.p.ps[r + 1]):
            if self.val[self.p.pd[j]] == UNK:
                unk_body += 1
                last_p = self.p.pd[j]
        for j in range(self.p.ns[r], self.p.ns[r + 1]):
            if self.val[self.p.nd[j]] == UNK:
                unk_body += 1
                last_n = self.p.nd[j]
        for j in range(self.p.hs[r], self.p.hs[r + 1]):
            v = self.val[self.p.hd[j]]
            if v == TRUE:
                return True
            if v == UNK:
                unk_heads += 1
                last_h = self.p.hd[j]
        if unk_body == 0:
            if unk_heads == 0:
                return False
            if unk_heads == 1:
                return self.assign(last_h, TRUE)
        elif unk_heads == 0 and unk_body == 1:
            if last_p >= 0:
                return self.assign(last_p, FALSE)
            return self.assign(last_n, TRUE)
        return True

    cdef bint check_support(self, int h):
        cdef int t, r, j, o, count = 0, last = -1
        cdef bint blocked
        if self.val[h] == FALSE:
            return True
        for t in range(self.p.ohs[h], self.p.ohs[h + 1]):
            r = self.p.ohd[t]
            if self.body_false(r):
                continue
            blocked = False
            for j in range(self.p.hs[r], self.p.hs[r + 1]):
                o = self.p.hd[j]
                if o != h and self.val[o] == TRUE:
                    blocked = True
                    break
            if blocked:
                continue
            count += 1
            last = r
            if count > 1:
                break
        if count == 0:
            return self.assign(h, FALSE)
        if count == 1 and self.val[h] == TRUE:
            r = last
            for j in range(self.p.ps[r], self.p.ps[r + 1]):
                if not self.assign(self.p.pd[j], TRUE):
                    return False
            for j in range(self.p.ns[r], self.p.ns[r + 1]):
                if not self.assign(self.p.nd[j], FALSE):
                    return False
            for j in range(self.p.hs[r], self.p.hs[r + 1]):
                o = self.p.hd[j]
                if o != h and not self.assign(o, FALSE):
                    return False
        return True

    cdef bint touch_rule(self, int r):
        cdef int j
        if not self.check_rule(r):
            return False
        for j in range(self.p.hs[r], self.p.hs[r + 1]):
            if not self.check_support(self.p.hd[j]):
                return False
        return True

    cdef bint propagate(self):
        cdef int i, t
        while self.qlen > 0:
            self.qlen -= 1
            i = self.queue[self.qlen]
            if self.val[i] == TRUE and not self.assign(self.p.comp[i], FALSE):
                self.qlen = 0
                return False
            for t in range(self.p.ohs[i], self.p.ohs[i + 1]):
                if not self.touch_rule(self.p.ohd[t]):
                    self.qlen = 0
                    return False
            for t in range(self.p.ops[i], self.p.ops[i + 1]):
                if not self.touch_rule(self.p.opd[t]):
                    self.qlen = 0
                    return False
            for t in range(self.p.ons[i], self.p.ons[i + 1]):
                if not self.touch_rule(self.p.ond[t]):
                    self.qlen = 0
                    return False
        return True

    cdef bint initial(self):
        cdef int i, r
        for i in range(self.n):
            if self.val[i] == TRUE:
                if not self.assign(self.p.comp[i], FALSE):
                    return False
        for r in range(self.nr):
            if not self.touch_rule(r):
                self.qlen = 0
                return False
        for i in range(self.n):
            if not self.check_support(i):
                self.qlen = 0
                return False
        return self.propagate()

    cdef void undo(self, int mark):
        while self.tlen > mark:
            self.tlen -= 1
            self.val[self.trail[self.tlen]] = UNK

    cdef bint done(self):
        return self.exceeded or (self.limit > 0 and len(self.models) >= self.limit)

    cdef void search(self, int start):
        cdef int i, j, mark, v
        if self.done():
            return
        i = start
        while i < self.n and self.val[i] != UNK:
            i += 1
        if i == self.n:
            s = [j for j in range(self.n) if self.val[j] == TRUE]
            if is_minimal(self.enc, s):
                self.models.append(tuple(s))
            return
        self.branches += 1
        if self.max_branches > 0 and self.branches > self.max_branches:
            self.exceeded = True
            return
        for v in (TRUE, FALSE):
            mark = self.tlen
            if self.assign(i, v) and self.propagate():
                self.search(i + 1)
            self.undo(mark)
            if self.done():
                return


def enumerate_models(enc, init, max_branches=0, limit=0):
    """Answer sets within the bounds ``init``; returns ``(models, branches, exceeded)``."""
    cdef _Search s = _Search(enc, init, max_branches, limit)
    if s.initial():
        s.search(0)
    return s.models, s.branches, s.exceeded


cdef struct _Min:
    int n
    int nsingle
    int *s_head
    int *s_ps
    int *s_pd
    int nmulti
    int *m_hs
    int *m_hd
    int *m_ps
    int *m_pd
    int size


cdef int _close(_Min *mm, char *m, int count):
    cdef bint changed = True, ok
    cdef int r, j
    while changed:
        changed = False
        for r in range(mm.nsingle):
            if m[mm.s_head[r]]:
                continue
            ok = True
            for j in range(mm.s_ps[r], mm.s_ps[r + 1]):
                if not m[mm.s_pd[j]]:
                    ok = False
                    break
            if ok:
                m[mm.s_head[r]] = 1
                count += 1
                changed = True
    return count


cdef bint _smaller_model(_Min *mm, char *m, int count):
    cdef int r, j, x, c2
    cdef bint ok, hit, found
    cdef char *m2
    for r in range(mm.nmulti):
        ok = True
        for j in range(mm.m_ps[r], mm.m_ps[r + 1]):
            if not m[mm.m_pd[j]]:
                ok = False
                break
        if not ok:
            continue
        hit = False
        for j in range(mm.m_hs[r], mm.m_hs[r + 1]):
            if m[mm.m_hd[j]]:
                hit = True
                break
        if hit:
            continue
        m2 = <char *> malloc(mm.n + 1)
        try:
            for j in range(mm.m_hs[r], mm.m_hs[r + 1]):
                x = mm.m_hd[j]
                memcpy(m2, m, mm.n + 1)
                m2[x] = 1
                c2 = _close(mm, m2, count + 1)
                if c2 < mm.size and _smaller_model(mm, m2, c2):
                    return True
        finally:
            free(m2)
        return False
    return True


def is_minimal(enc, s):
    """True iff no proper subset of ``s`` is a model of the reduct of the program by ``s``."""
    cdef _Prog p = _Prog(enc)
    cdef int n = p.n, nr = p.nr, r, j, i, nh, count
    cdef bint ok
    cdef char *in_s = <char *> calloc(n + 1, 1)
    cdef char *m = <char *> calloc(n + 1, 1)
    cdef _Min mm
    single_head, single_pos, multi_head, multi_pos = [], [], [], []
    try:
        for i in s:
            in_s[i] = 1
        for r in range(nr):
            if p.hs[r] == p.hs[r + 1]:
                continue
            ok = True
            for j in range(p.ns[r], p.ns[r + 1]):
                if in_s[p.nd[j]]:
                    ok = False
                    break
            if ok:
                for j in range(p.ps[r], p.ps[r + 1]):
                    if not in_s[p.pd[j]]:
                        ok = False
                        break
            if not ok:
                continue
            heads = [p.hd[j] for j in range(p.hs[r], p.hs[r + 1]) if in_s[p.hd[j]]]
            pos = [p.pd[j] for j in range(p.ps[r], p.ps[r + 1])]
            if len(heads) == 1:
                single_head.append(heads[0])
                single_pos.append(pos)
            else:
                multi_head.append(heads)
                multi_pos.append(pos)
        mm.n = n
        mm.size = len(s)
        mm.nsingle = len(single_head)
        mm.nmulti = len(multi_head)
        mm.s_head = _ints(single_head)
        _csr(single_pos, &mm.s_ps, &mm.s_pd)
        _csr(multi_head, &mm.m_hs, &mm.m_hd)
        _csr(multi_pos, &mm.m_ps, &mm.m_pd)
        try:
            count = _close(&mm, m, 0)
            if count == mm.size:
                return True
            return not _smaller_model(&mm, m, count)
        finally:
            free(mm.s_head)
            free(mm.s_ps)
            free(mm.s_pd)
            free(mm.m_hs)
            free(mm.m_hd)
            free(mm.m_ps)
            free(mm.m_pd)
    finally:
        free(in_s)
        free(m)


cdef int *_ints(list xs):
    cdef int *out = <int *> malloc((len(xs) + 1) * sizeof(int))
    cdef int i
    for i in range(len(xs)):
        out[i] = xs[i]
    return out


cdef void _csr(list rows, int **starts, int **data):
    cdef int total = sum(len(r) for r in rows)
    cdef int i, k = 0
    starts[0] = <int *> malloc((len(rows) + 1) * sizeof(int))
    data[0] = <int *> malloc((total + 1) * sizeof(int))
    starts[0][0] = 0
    for i in range(len(rows)):
        for x in rows[i]:
            data[0][k] = x
            k += 1
        starts[0][i + 1] = k
