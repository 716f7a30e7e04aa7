# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the functions in ``_kernels.py``.

Index arithmetic, degree checks and pairing evaluation run in C; the exact
coefficients stay Python integers.
"""
import numpy as np

BACKEND = "cython"


cdef class Tables:
    cdef public long[::1] ell
    cdef public long[::1] keys
    cdef public unsigned long long[::1] amask
    cdef public unsigned long long[::1] pmask
    cdef public long[:, ::1] exps
    cdef public long[:, ::1] rowp
    cdef public int[::1] key_to_idx
    cdef public long level
    cdef public bint twisted
    cdef public int rank


def make_tables(ell, keys, amask, pmask, exps, rowp, key_to_idx, level, twisted):
    cdef Tables T = Tables()
    T.ell = np.ascontiguousarray(ell, dtype=np.int_)
    T.keys = np.ascontiguousarray(keys, dtype=np.int_)
    T.amask = np.ascontiguousarray(amask, dtype=np.uint64)
    T.pmask = np.ascontiguousarray(pmask, dtype=np.uint64)
    T.exps = np.ascontiguousarray(exps, dtype=np.int_)
    T.rowp = np.ascontiguousarray(rowp, dtype=np.int_)
    T.key_to_idx = np.ascontiguousarray(key_to_idx, dtype=np.intc)
    T.level = level
    T.twisted = twisted
    T.rank = T.exps.shape[1]
    return T


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _parity(unsigned long long x) nogil:
    return __builtin_popcountll(x) & 1


cdef tuple _sorted_items(dict s, long[::1] ell):
    cdef list items = sorted(s.items(), key=lambda kv: ell[kv[0]])
    cdef Py_ssize_t n = len(items)
    cdef long[::1] idx = np.empty(n, dtype=np.int_)
    cdef list coefs = [None] * n
    cdef Py_ssize_t i
    for i in range(n):
        idx[i] = items[i][0]
        coefs[i] = items[i][1]
    return idx, coefs


def mul(dict a, dict b, Tables T):
    cdef long[::1] bidx
    cdef list bcoef
    bidx, bcoef = _sorted_items(b, T.ell)
    cdef Py_ssize_t nb = bidx.shape[0]
    cdef dict out = {}
    cdef long ia, ib, room, ka, k
    cdef unsigned long long ma
    cdef Py_ssize_t j
    cdef object ca, c
    for key, ca in a.items():
        ia = key
        room = T.level - T.ell[ia]
        if room < 0:
            continue
        ka = T.keys[ia]
        ma = T.amask[ia]
        for j in range(nb):
            ib = bidx[j]
            if T.ell[ib] > room:
                break
            c = ca * bcoef[j]
            if T.twisted and _parity(ma & T.pmask[ib]):
                c = -c
            k = T.key_to_idx[ka + T.keys[ib]]
            if k in out:
                out[k] = out[k] + c
            else:
                out[k] = c
    return {k2: v for k2, v in out.items() if v}


def derive(dict h, dict s, Tables T):
    cdef long[::1] sidx
    cdef list scoef
    sidx, scoef = _sorted_items(s, T.ell)
    cdef Py_ssize_t ns = sidx.shape[0]
    cdef dict out = {}
    cdef long ig, im, room, kg, k, p
    cdef Py_ssize_t j, r
    cdef int d = T.rank
    cdef object cg, c
    for key, cg in h.items():
        ig = key
        room = T.level - T.ell[ig]
        if room < 0:
            continue
        kg = T.keys[ig]
        for j in range(ns):
            im = sidx[j]
            if T.ell[im] > room:
                break
            p = 0
            for r in range(d):
                p += T.rowp[ig, r] * T.exps[im, r]
            if p == 0:
                continue
            c = cg * scoef[j] * p
            if T.twisted and (p & 1):
                c = -c
            k = T.key_to_idx[kg + T.keys[im]]
            if k in out:
                out[k] = out[k] + c
            else:
                out[k] = c
    return {k2: v for k2, v in out.items() if v}
