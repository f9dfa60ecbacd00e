# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of :mod:`matchkit._pykernels` (same signatures, same results)."""

import numpy as np

from matchkit.errors import InternalInvariantError


cdef inline const int[:, ::1] _table(a):
    return np.ascontiguousarray(a, dtype=np.int32)


cdef inline const int[::1] _vector(a):
    return np.ascontiguousarray(a, dtype=np.int32)


def gale_shapley(men_pref, men_len, women_rank):
    """Man-proposing deferred acceptance; returns ``wife`` (0 = single)."""
    cdef const int[:, ::1] pref = _table(men_pref)
    cdef const int[::1] lens = _vector(men_len)
    cdef const int[:, ::1] wr = _table(women_rank)
    cdef Py_ssize_t n_m = pref.shape[0] - 1
    cdef Py_ssize_t n_w = wr.shape[0] - 1
    cdef int[::1] wife = np.zeros(n_m + 1, dtype=np.int32)
    cdef int[::1] husband = np.zeros(n_w + 1, dtype=np.int32)
    cdef int[::1] nxt = np.zeros(n_m + 1, dtype=np.int32)
    cdef int[::1] free = np.zeros(n_m + 1, dtype=np.int32)
    cdef Py_ssize_t top = 0
    cdef int m, k, end, w, h
    for m in range(n_m, 0, -1):
        free[top] = m
        top += 1
    while top:
        top -= 1
        m = free[top]
        k = nxt[m]
        end = lens[m]
        while k < end:
            w = pref[m, k]
            k += 1
            h = husband[w]
            if wr[w, m] < wr[w, h]:
                husband[w] = m
                wife[m] = w
                if h:
                    wife[h] = 0
                    free[top] = h
                    top += 1
                break
        nxt[m] = k
    return list(wife)


cdef int _successor(const int[:, ::1] pref, const int[:, ::1] wr, int[::1] husband,
                    int[::1] spos, int[::1] zp, int m) except -1:
    cdef int p = spos[m]
    cdef int limit = zp[m]
    cdef int w
    while p <= limit:
        w = pref[m, p]
        if wr[w, m] < wr[w, husband[w]]:
            spos[m] = p
            return husband[w]
        p += 1
    raise InternalInvariantError(f"man {m} has no successor before his woman-optimal partner")


def rotation_chase(men_pref, men_rank, women_rank, wife0, wifez):
    """All rotations, in one valid elimination order from ``wife0`` to ``wifez``."""
    cdef const int[:, ::1] pref = _table(men_pref)
    cdef const int[:, ::1] mr = _table(men_rank)
    cdef const int[:, ::1] wr = _table(women_rank)
    cdef Py_ssize_t n_m = pref.shape[0] - 1
    cdef Py_ssize_t n_w = wr.shape[0] - 1
    cdef int[::1] wife = np.array(list(wife0), dtype=np.int32)
    cdef const int[::1] wz = _vector(list(wifez))
    cdef int[::1] husband = np.zeros(n_w + 1, dtype=np.int32)
    cdef int[::1] ptr = np.full(n_m + 1, -1, dtype=np.int32)
    cdef int[::1] zp = np.full(n_m + 1, -1, dtype=np.int32)
    cdef int[::1] spos = np.zeros(n_m + 1, dtype=np.int32)
    cdef int[::1] where = np.full(n_m + 1, -1, dtype=np.int32)
    cdef int[::1] stack = np.zeros(n_m + 1, dtype=np.int32)
    cdef Py_ssize_t depth = 0, cut, k, i
    cdef int m, nm, start, x, w
    for m in range(1, n_m + 1):
        if wife[m]:
            husband[wife[m]] = m
            ptr[m] = mr[m, wife[m]]
        if wz[m]:
            zp[m] = mr[m, wz[m]]
        spos[m] = ptr[m] + 1
    rotations = []
    for start in range(1, n_m + 1):
        while ptr[start] < zp[start]:
            if depth == 0:
                stack[0] = start
                where[start] = 0
                depth = 1
            while depth:
                m = stack[depth - 1]
                nm = _successor(pref, wr, husband, spos, zp, m)
                if where[nm] < 0:
                    if ptr[nm] >= zp[nm]:
                        raise InternalInvariantError(f"successor {nm} is already at his woman-optimal partner")
                    where[nm] = depth
                    stack[depth] = nm
                    depth += 1
                    continue
                cut = where[nm]
                k = depth - cut
                pairs = [(stack[cut + i], wife[stack[cut + i]]) for i in range(k)]
                for i in range(k):
                    x = stack[cut + i]
                    w = pairs[(i + 1) % k][1]
                    wife[x] = w
                    husband[w] = x
                    ptr[x] = mr[x, w]
                    if spos[x] <= ptr[x]:
                        spos[x] = ptr[x] + 1
                    where[x] = -1
                depth = cut
                rotations.append(pairs)
                if depth == 0:
                    break
    return rotations


cdef class _SrSearch:
    cdef const int[:, ::1] rt
    cdef int n
    cdef int[::1] mate
    cdef int[::1] placed
    cdef int n_placed
    cdef list out

    def __init__(self, rank_table, int n):
        self.rt = _table(rank_table)
        self.n = n
        self.mate = np.zeros(n + 1, dtype=np.int32)
        self.placed = np.zeros(n + 1, dtype=np.int32)
        self.n_placed = 0
        self.out = []

    cdef inline bint blocks(self, int a, int b):
        return self.rt[a, b] < self.rt[a, self.mate[a]] and self.rt[b, a] < self.rt[b, self.mate[b]]

    cdef void rec(self):
        cdef int i = 1, j, t, q
        cdef bint ok
        while i <= self.n and self.mate[i]:
            i += 1
        if i > self.n:
            self.out.append(tuple(self.mate[1:]))
            return
        for j in range(i + 1, self.n + 1):
            if self.mate[j]:
                continue
            self.mate[i] = j
            self.mate[j] = i
            ok = True
            for t in range(self.n_placed):
                q = self.placed[t]
                if self.blocks(i, q) or self.blocks(j, q):
                    ok = False
                    break
            if ok:
                self.placed[self.n_placed] = i
                self.placed[self.n_placed + 1] = j
                self.n_placed += 2
                self.rec()
                self.n_placed -= 2
            self.mate[i] = 0
            self.mate[j] = 0


def sr_stable_matchings(rank_table, n):
    """All stable perfect roommate matchings by exhaustive pairing."""
    search = _SrSearch(rank_table, n)
    search.rec()
    return search.out


cdef class _SmSearch:
    cdef const int[:, ::1] pref
    cdef const int[::1] lens
    cdef const int[:, ::1] mr
    cdef const int[:, ::1] wr
    cdef int n_m, n_w
    cdef int[::1] wife
    cdef int[::1] husband
    cdef list out

    def __init__(self, men_pref, men_len, men_rank, women_rank):
        self.pref = _table(men_pref)
        self.lens = _vector(men_len)
        self.mr = _table(men_rank)
        self.wr = _table(women_rank)
        self.n_m = self.pref.shape[0] - 1
        self.n_w = self.wr.shape[0] - 1
        self.wife = np.zeros(self.n_m + 1, dtype=np.int32)
        self.husband = np.zeros(self.n_w + 1, dtype=np.int32)
        self.out = []

    cdef bint leaf_ok(self):
        cdef int w, m
        for w in range(1, self.n_w + 1):
            if self.husband[w]:
                continue
            for m in range(1, self.n_m + 1):
                if self.wr[w, m] < self.wr[w, 0] and self.mr[m, w] < self.mr[m, self.wife[m]]:
                    return False
        return True

    cdef void rec(self, int m):
        cdef int k, kk, w, v, h, e, n_k
        cdef bint ok
        if m > self.n_m:
            if self.leaf_ok():
                self.out.append(tuple(self.wife[1:]))
            return
        n_k = self.lens[m]
        for k in range(n_k + 1):
            w = self.pref[m, k] if k < n_k else 0
            if w and self.husband[w]:
                continue
            self.wife[m] = w
            ok = True
            for kk in range(k):
                v = self.pref[m, kk]
                h = self.husband[v]
                if h and self.wr[v, m] < self.wr[v, h]:
                    ok = False
                    break
            if ok and w:
                for e in range(1, m):
                    if self.wr[w, e] < self.wr[w, m] and self.mr[e, w] < self.mr[e, self.wife[e]]:
                        ok = False
                        break
            if ok:
                if w:
                    self.husband[w] = m
                self.rec(m + 1)
                if w:
                    self.husband[w] = 0
            self.wife[m] = 0


def sm_stable_matchings(men_pref, men_len, men_rank, women_rank):
    """All stable matchings of an SMI instance by backtracking over men."""
    search = _SmSearch(men_pref, men_len, men_rank, women_rank)
    search.rec(1)
    return search.out
