# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels; see ``_kernels_py`` for semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef int[8] _NDY = [-1, -1, -1, 0, 1, 1, 1, 0]
cdef int[8] _NDX = [-1, 0, 1, 1, 1, 0, -1, -1]


def glcm_counts(codes, offsets, int levels):
    cdef const int[:, ::1] c = np.ascontiguousarray(codes, dtype=np.int32)
    cdef const long long[:, ::1] off = np.ascontiguousarray(np.asarray(offsets, dtype=np.int64).reshape(-1, 2))
    out_arr = np.zeros((levels, levels), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    cdef Py_ssize_t h = c.shape[0], w = c.shape[1]
    cdef Py_ssize_t k, y, x, y2, x2
    cdef int a, b
    cdef long long dx, dy
    for k in range(off.shape[0]):
        dx = off[k, 0]
        dy = off[k, 1]
        for y in range(h):
            y2 = y + dy
            if y2 < 0 or y2 >= h:
                continue
            for x in range(w):
                x2 = x + dx
                if x2 < 0 or x2 >= w:
                    continue
                a = c[y, x]
                b = c[y2, x2]
                if a < 0 or b < 0:
                    continue
                out[a, b] += 1
                out[b, a] += 1
    return out_arr


def lbp_codes(image, mask):
    cdef const double[:, ::1] img = np.ascontiguousarray(image, dtype=np.float64)
    cdef const cnp.uint8_t[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t y, x, n = 0
    cdef int k
    cdef long long code
    cdef double centre
    if h < 3 or w < 3:
        return np.zeros(0, dtype=np.int64)
    out_arr = np.empty((h - 2) * (w - 2), dtype=np.int64)
    cdef long long[::1] out = out_arr
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            if not m[y, x]:
                continue
            centre = img[y, x]
            code = 0
            for k in range(8):
                if img[y + _NDY[k], x + _NDX[k]] >= centre:
                    code |= (<long long>1) << (7 - k)
            out[n] = code
            n += 1
    return out_arr[:n].copy()


def best_split(X, y, rows, features, int n_classes, Py_ssize_t min_features):
    cdef const double[:, :] Xv = X
    cdef const cnp.intp_t[:] yv = np.asarray(y, dtype=np.intp)
    cdef const cnp.intp_t[::1] r = np.ascontiguousarray(rows, dtype=np.intp)
    cdef Py_ssize_t m = r.shape[0]
    cdef int best_f = -1
    cdef double best_t = 0.0, best_s = -np.inf
    if m < 2:
        return best_f, best_t, best_s
    cdef long long *cl = <long long *> malloc(n_classes * sizeof(long long))
    cdef long long *ctot = <long long *> malloc(n_classes * sizeof(long long))
    vals_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] vals = vals_arr
    cdef cnp.intp_t[::1] order
    cdef Py_ssize_t i, k, tried = 0
    cdef long long a, b, cc, nl, nr, tot2 = 0
    cdef int f, cls
    cdef double score, lo, hi, t
    try:
        for i in range(n_classes):
            ctot[i] = 0
        for i in range(m):
            ctot[yv[r[i]]] += 1
        for i in range(n_classes):
            tot2 += ctot[i] * ctot[i]
        for f in features:
            tried += 1
            for i in range(m):
                vals[i] = Xv[r[i], f]
            order = np.argsort(vals_arr, kind="stable")
            for i in range(n_classes):
                cl[i] = 0
            a = 0
            b = tot2
            for k in range(m - 1):
                cls = yv[r[order[k]]]
                cc = cl[cls]
                a += 2 * cc + 1
                b -= 2 * (ctot[cls] - cc) - 1
                cl[cls] = cc + 1
                lo = vals[order[k]]
                hi = vals[order[k + 1]]
                if not lo < hi:
                    continue
                nl = k + 1
                nr = m - nl
                score = <double>a / <double>nl + <double>b / <double>nr
                if score > best_s:
                    best_s = score
                    best_f = f
                    t = lo + (hi - lo) / 2.0
                    best_t = lo if t >= hi else t
            if tried >= min_features and best_f >= 0:
                break
    finally:
        free(cl)
        free(ctot)
    return best_f, best_t, best_s
