"""Pure-Python search kernels; ``_ckernels.pyx`` mirrors this file line for line."""
from __future__ import annotations

import sys

UNK, TRUE, FALSE = 0, 1, 2


def _lists(enc):
    return (list(enc.comp), list(enc.hs), list(enc.hd), list(enc.ps), list(enc.pd), list(enc.ns),
            list(enc.nd), list(enc.ohs), list(enc.ohd), list(enc.ops), list(enc.opd), list(enc.ons),
            list(enc.ond))


def well_founded(enc):
    """Return ``(val, entered, consistent)`` for the well-founded fixpoint."""
    n, nr = enc.n, enc.nr
    comp, hs, hd, ps, pd, ns, nd, ohs, ohd, ops, opd, ons, ond = _lists(enc)
    val = [UNK] * n
    entered = [0] * n
    consistent = True
    k = 0
    while True:
        k += 1
        new_true = []
        for r in range(nr):
            if hs[r] == hs[r + 1]:
                continue
            ok = True
            for j in range(ps[r], ps[r + 1]):
                if val[pd[j]] != TRUE:
                    ok = False
                    break
            if ok:
                for j in range(ns[r], ns[r + 1]):
                    if val[nd[j]] != FALSE:
                        ok = False
                        break
            if not ok:
                continue
            cand = -1
            open_heads = 0
            for j in range(hs[r], hs[r + 1]):
                if val[hd[j]] != FALSE:
                    open_heads += 1
                    cand = hd[j]
            if open_heads == 1 and val[cand] == UNK:
                new_true.append(cand)
        # greatest unfounded set by removing founded literals
        in_x = [val[i] != TRUE for i in range(n)]
        cnt = [0] * nr
        usable = [False] * nr
        queue = []
        for r in range(nr):
            if hs[r] == hs[r + 1]:
                continue
            u = True
            for j in range(ns[r], ns[r + 1]):
                if val[nd[j]] == TRUE:
                    u = False
                    break
            if u:
                for j in range(hs[r], hs[r + 1]):
                    if val[hd[j]] == TRUE:
                        u = False
                        break
            if u:
                for j in range(ps[r], ps[r + 1]):
                    if val[pd[j]] == FALSE:
                        u = False
                        break
            usable[r] = u
            c = 0
            for j in range(ps[r], ps[r + 1]):
                if in_x[pd[j]]:
                    c += 1
            cnt[r] = c
            if u and c == 0:
                queue.append(r)
        while queue:
            r = queue.pop()
            for j in range(hs[r], hs[r + 1]):
                h = hd[j]
                if in_x[h]:
                    in_x[h] = False
                    for t in range(ops[h], ops[h + 1]):
                        r2 = opd[t]
                        cnt[r2] -= 1
                        if cnt[r2] == 0 and usable[r2]:
                            queue.append(r2)
        changed = False
        for i in new_true:
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
        if val[i] == TRUE and val[comp[i]] == TRUE:
            consistent = False
    return val, entered, consistent


class _Search:
    def __init__(self, enc, init, max_branches, limit):
        self.n, self.nr = enc.n, enc.nr
        (self.comp, self.hs, self.hd, self.ps, self.pd, self.ns, self.nd, self.ohs, self.ohd, self.ops,
         self.opd, self.ons, self.ond) = _lists(enc)
        self.enc = enc
        self.val = list(init)
        self.trail = []
        self.queue = []
        self.max_branches = max_branches
        self.limit = limit
        self.branches = 0
        self.exceeded = False
        self.models = []

    def assign(self, i, v):
        cur = self.val[i]
        if cur == v:
            return True
        if cur != UNK:
            return False
        self.val[i] = v
        self.trail.append(i)
        self.queue.append(i)
        return True

    def body_false(self, r):
        val = self.val
        for j in range(self.ps[r], self.ps[r + 1]):
            if val[self.pd[j]] == FALSE:
                return True
        for j in range(self.ns[r], self.ns[r + 1]):
            if val[self.nd[j]] == TRUE:
                return True
        return False

    def check_rule(self, r):
        val = self.val
        if self.body_false(r):
            return True
        unk_body = 0
        last_p = -1
        last_n = -1
        for j in range(self.ps[r], self.ps[r + 1]):
            if val[self.pd[j]] == UNK:
                unk_body += 1
                last_p = self.pd[j]
        for j in range(self.ns[r], self.ns[r + 1]):
            if val[self.nd[j]] == UNK:
                unk_body += 1
                last_n = self.nd[j]
        unk_heads = 0
        last_h = -1
        for j in range(self.hs[r], self.hs[r + 1]):
            v = val[self.hd[j]]
            if v == TRUE:
                return True
            if v == UNK:
                unk_heads += 1
                last_h = self.hd[j]
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

    def check_support(self, h):
        val = self.val
        if val[h] == FALSE:
            return True
        count = 0
        last = -1
        for t in range(self.ohs[h], self.ohs[h + 1]):
            r = self.ohd[t]
            if self.body_false(r):
                continue
            blocked = False
            for j in range(self.hs[r], self.hs[r + 1]):
                o = self.hd[j]
                if o != h and val[o] == TRUE:
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
        if count == 1 and val[h] == TRUE:
            r = last
            for j in range(self.ps[r], self.ps[r + 1]):
                if not self.assign(self.pd[j], TRUE):
                    return False
            for j in range(self.ns[r], self.ns[r + 1]):
                if not self.assign(self.nd[j], FALSE):
                    return False
            for j in range(self.hs[r], self.hs[r + 1]):
                o = self.hd[j]
                if o != h and not self.assign(o, FALSE):
                    return False
        return True

    def touch_rule(self, r):
        if not self.check_rule(r):
            return False
        for j in range(self.hs[r], self.hs[r + 1]):
            if not self.check_support(self.hd[j]):
                return False
        return True

    def propagate(self):
        queue = self.queue
        while queue:
            i = queue.pop()
            if self.val[i] == TRUE and not self.assign(self.comp[i], FALSE):
                queue.clear()
                return False
            for occ_s, occ_d in ((self.ohs, self.ohd), (self.ops, self.opd), (self.ons, self.ond)):
                for t in range(occ_s[i], occ_s[i + 1]):
                    if not self.touch_rule(occ_d[t]):
                        queue.clear()
                        return False
        return True

    def initial(self):
        for i in range(self.n):
            if self.val[i] == TRUE:
                if not self.assign(self.comp[i], FALSE):
                    return False
        for r in range(self.nr):
            if not self.touch_rule(r):
                self.queue.clear()
                return False
        for i in range(self.n):
            if not self.check_support(i):
                self.queue.clear()
                return False
        return self.propagate()

    def undo(self, mark):
        trail, val = self.trail, self.val
        while len(trail) > mark:
            val[trail.pop()] = UNK

    def search(self, start):
        if self.exceeded or (self.limit and len(self.models) >= self.limit):
            return
        val = self.val
        i = start
        while i < self.n and val[i] != UNK:
            i += 1
        if i == self.n:
            s = [j for j in range(self.n) if val[j] == TRUE]
            if is_minimal(self.enc, s):
                self.models.append(tuple(s))
            return
        self.branches += 1
        if self.max_branches and self.branches > self.max_branches:
            self.exceeded = True
            return
        for v in (TRUE, FALSE):
            mark = len(self.trail)
            if self.assign(i, v) and self.propagate():
                self.search(i + 1)
            self.undo(mark)
            if self.exceeded or (self.limit and len(self.models) >= self.limit):
                return


def enumerate_models(enc, init, max_branches=0, limit=0):
    """Answer sets of the encoded normal/disjunctive program within the bounds ``init``.

    Returns ``(models, branches, exceeded)`` with models as sorted id tuples.
    """
    s = _Search(enc, init, max_branches, limit)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * enc.n + 1000))
    try:
        if s.initial():
            s.search(0)
    finally:
        sys.setrecursionlimit(old)
    return s.models, s.branches, s.exceeded


def is_minimal(enc, s):
    """True iff no proper subset of ``s`` is a model of the reduct of the program by ``s``."""
    n, nr = enc.n, enc.nr
    hs, hd, ps, pd, ns, nd = enc.hs, enc.hd, enc.ps, enc.pd, enc.ns, enc.nd
    in_s = [False] * n
    for i in s:
        in_s[i] = True
    size = len(s)
    rel = []
    for r in range(nr):
        if hs[r] == hs[r + 1]:
            continue
        ok = True
        for j in range(ns[r], ns[r + 1]):
            if in_s[nd[j]]:
                ok = False
                break
        if ok:
            for j in range(ps[r], ps[r + 1]):
                if not in_s[pd[j]]:
                    ok = False
                    break
        if ok:
            heads = [hd[j] for j in range(hs[r], hs[r + 1]) if in_s[hd[j]]]
            rel.append((heads, [pd[j] for j in range(ps[r], ps[r + 1])]))
    single = [(h[0], p) for h, p in rel if len(h) == 1]
    multi = [(h, p) for h, p in rel if len(h) > 1]

    def close(m, count):
        changed = True
        while changed:
            changed = False
            for h, p in single:
                if not m[h] and all(m[x] for x in p):
                    m[h] = True
                    count += 1
                    changed = True
        return count

    def smaller_model(m, count):
        for h, p in multi:
            if all(m[x] for x in p) and not any(m[x] for x in h):
                for x in h:
                    m2 = list(m)
                    m2[x] = True
                    c2 = close(m2, count + 1)
                    if c2 < size and smaller_model(m2, c2):
                        return True
                return False
        return True

    m = [False] * n
    count = close(m, 0)
    if count == size:
        return True
    return not smaller_model(m, count)
