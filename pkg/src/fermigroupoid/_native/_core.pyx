# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for sector assembly (lattices of at most 63 sites)."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int popcount(uint64_t x) nogil:
    return __builtin_popcountll(x)


cdef int64_t[:, :] _binomials(int n):
    cdef int64_t[:, :] c = np.zeros((n + 2, n + 2), dtype=np.int64)
    cdef int i, j
    for i in range(n + 2):
        c[i, 0] = 1
        for j in range(1, i + 1):
            c[i, j] = c[i - 1, j - 1] + c[i - 1, j]
    return c


cdef inline int64_t lex_rank(uint64_t mask, int n, int64_t[:, :] binom) nogil:
    cdef int k = popcount(mask)
    cdef int64_t rank = binom[n, k] - 1
    cdef int i = 1
    cdef int c
    while mask:
        c = __builtin_ctzll(mask)
        rank -= binom[n - 1 - c, k - i + 1]
        mask &= mask - 1
        i += 1
    return rank


cdef inline int merge_parity(uint64_t fixed, uint64_t extra) nogil:
    cdef int count = 0
    cdef int j
    while fixed:
        j = __builtin_ctzll(fixed)
        count += popcount(extra & ((<uint64_t>1 << j) - 1))
        fixed &= fixed - 1
    return count & 1


def dress_terms(cre_masks, ann_masks, values, int n_sites, int n_particles):
    cdef uint64_t[:] cm = np.ascontiguousarray(cre_masks, dtype=np.uint64)
    cdef uint64_t[:] am = np.ascontiguousarray(ann_masks, dtype=np.uint64)
    cdef double complex[:] vv = np.ascontiguousarray(values, dtype=np.complex128)
    cdef int64_t[:, :] binom = _binomials(n_sites)
    cdef Py_ssize_t t, total = 0
    cdef int n, extra, nfree, i, k
    cdef uint64_t full, freemask, gm
    cdef int free[64]
    cdef int idx[64]

    if n_sites > 63:
        raise ValueError("compiled kernel handles at most 63 sites")
    full = (<uint64_t>1 << n_sites) - 1

    for t in range(cm.shape[0]):
        n = popcount(cm[t])
        extra = n_particles - n
        if extra < 0 or popcount(am[t]) != n:
            continue
        nfree = popcount(full & ~(cm[t] | am[t]))
        if extra <= nfree:
            total += binom[nfree, extra]

    rows_arr = np.empty(total, dtype=np.int64)
    cols_arr = np.empty(total, dtype=np.int64)
    vals_arr = np.empty(total, dtype=np.complex128)
    cdef int64_t[:] rows = rows_arr
    cdef int64_t[:] cols = cols_arr
    cdef double complex[:] out = vals_arr
    cdef Py_ssize_t pos = 0
    cdef int parity

    with nogil:
        for t in range(cm.shape[0]):
            n = popcount(cm[t])
            extra = n_particles - n
            if extra < 0 or popcount(am[t]) != n:
                continue
            freemask = full & ~(cm[t] | am[t])
            nfree = 0
            while freemask:
                free[nfree] = __builtin_ctzll(freemask)
                freemask &= freemask - 1
                nfree += 1
            if extra > nfree:
                continue
            for i in range(extra):
                idx[i] = i
            while True:
                gm = 0
                for i in range(extra):
                    gm |= <uint64_t>1 << free[idx[i]]
                parity = merge_parity(cm[t], gm) ^ merge_parity(am[t], gm)
                rows[pos] = lex_rank(cm[t] | gm, n_sites, binom)
                cols[pos] = lex_rank(am[t] | gm, n_sites, binom)
                out[pos] = -vv[t] if parity else vv[t]
                pos += 1
                # next combination of extra indices out of nfree
                k = extra - 1
                while k >= 0 and idx[k] == nfree - extra + k:
                    k -= 1
                if k < 0:
                    break
                idx[k] += 1
                for i in range(k + 1, extra):
                    idx[i] = idx[i - 1] + 1
    return rows_arr, cols_arr, vals_arr
