# cython: language_level=3
"""Compiled kernels for the per-edge hot loops.

Mirrors `_fallback` exactly; `sparsepalette.kernels` prefers this module when
it compiled.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.uint8_t u8


cdef inline Py_ssize_t _merge_count(const i64[:] arr, Py_ssize_t a0, Py_ssize_t a1,
                                    Py_ssize_t b0, Py_ssize_t b1) noexcept nogil:
    cdef Py_ssize_t i = a0, j = b0, cnt = 0
    while i < a1 and j < b1:
        if arr[i] < arr[j]:
            i += 1
        elif arr[i] > arr[j]:
            j += 1
        else:
            cnt += 1
            i += 1
            j += 1
    return cnt


def common_neighbor_counts(const i64[:] indptr, const i64[:] indices,
                           const i64[:] eu, const i64[:] ev):
    cdef Py_ssize_t m = eu.shape[0]
    out = np.zeros(m, dtype=np.int64)
    cdef i64[:] o = out
    cdef Py_ssize_t k, u, v
    with nogil:
        for k in range(m):
            u = eu[k]
            v = ev[k]
            o[k] = _merge_count(indices, indptr[u], indptr[u + 1],
                                indptr[v], indptr[v + 1])
    return out


def count_triangles(const i64[:] indptr, const i64[:] indices,
                    const i64[:] eu, const i64[:] ev):
    cdef Py_ssize_t m = eu.shape[0]
    cdef i64 total = 0
    cdef Py_ssize_t k
    with nogil:
        for k in range(m):
            total += _merge_count(indices, indptr[eu[k]], indptr[eu[k] + 1],
                                  indptr[ev[k]], indptr[ev[k] + 1])
    return int(total) // 3


def lists_intersect(const i64[:] lptr, const i64[:] lcol,
                    const i64[:] eu, const i64[:] ev):
    cdef Py_ssize_t m = eu.shape[0]
    out = np.zeros(m, dtype=np.uint8)
    cdef u8[:] o = out
    cdef Py_ssize_t k, i, j, a1, b1, u, v
    with nogil:
        for k in range(m):
            u = eu[k]
            v = ev[k]
            i = lptr[u]
            a1 = lptr[u + 1]
            j = lptr[v]
            b1 = lptr[v + 1]
            while i < a1 and j < b1:
                if lcol[i] < lcol[j]:
                    i += 1
                elif lcol[i] > lcol[j]:
                    j += 1
                else:
                    o[k] = 1
                    break
    return out


def c_degree_table(const i64[:] indptr, const i64[:] indices,
                   const i64[:] lptr, const i64[:] lcol):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    table = np.zeros(lcol.shape[0], dtype=np.int64)
    cdef i64[:] t = table
    cdef Py_ssize_t u, v, p, i, j, a1, b1
    with nogil:
        for u in range(n):
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                if v <= u:
                    continue
                i = lptr[u]
                a1 = lptr[u + 1]
                j = lptr[v]
                b1 = lptr[v + 1]
                while i < a1 and j < b1:
                    if lcol[i] < lcol[j]:
                        i += 1
                    elif lcol[i] > lcol[j]:
                        j += 1
                    else:
                        t[i] += 1
                        t[j] += 1
                        i += 1
                        j += 1
    return table


def greedy_fill(const i64[:] indptr, const i64[:] indices,
                const i64[:] lptr, const i64[:] lcol,
                const i64[:] order, i64[:] colors):
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t maxdeg = 0, k, v, p, nd
    for v in range(indptr.shape[0] - 1):
        if indptr[v + 1] - indptr[v] > maxdeg:
            maxdeg = indptr[v + 1] - indptr[v]
    scratch = np.zeros(maxdeg + 1, dtype=np.int64)
    cdef i64[:] used = scratch
    cdef i64 c, chosen
    cdef Py_ssize_t lo, hi, mid
    cdef bint found
    with nogil:
        for k in range(n):
            v = order[k]
            nd = 0
            for p in range(indptr[v], indptr[v + 1]):
                c = colors[indices[p]]
                if c != 0:
                    used[nd] = c
                    nd += 1
            # insertion sort: neighbor color sets are small
            for p in range(1, nd):
                c = used[p]
                mid = p
                while mid > 0 and used[mid - 1] > c:
                    used[mid] = used[mid - 1]
                    mid -= 1
                used[mid] = c
            chosen = 0
            for p in range(lptr[v], lptr[v + 1]):
                c = lcol[p]
                lo = 0
                hi = nd
                found = False
                while lo < hi:
                    mid = (lo + hi) // 2
                    if used[mid] < c:
                        lo = mid + 1
                    elif used[mid] > c:
                        hi = mid
                    else:
                        found = True
                        break
                if not found:
                    chosen = c
                    break
            if chosen == 0:
                with gil:
                    return int(v)
            colors[v] = chosen
    return -1


def first_monochromatic(const i64[:] indptr, const i64[:] indices,
                        const i64[:] colors):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t u, p
    cdef i64 cu
    with nogil:
        for u in range(n):
            cu = colors[u]
            if cu == 0:
                continue
            for p in range(indptr[u], indptr[u + 1]):
                if indices[p] > u and colors[indices[p]] == cu:
                    with gil:
                        return int(u), int(indices[p])
    return -1, -1
