# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: direct kernel sums and the oscillation reduction.

Semantics mirror ``fallback.py`` exactly (same skip rules, same symbol
interpolation); the backend-agreement tests hold the two implementations
together.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, fabs, floor, fmod, pow, rint, sqrt

cnp.import_array()

DEF TWO_PI = 6.283185307179586476925286766559

cdef int SYM_PAIR_C = 0
cdef int SYM_TABLE_LINEAR_C = 1
cdef int SYM_TABLE_NEAREST_C = 2


cdef inline double _omega_scalar(double dx, double dy, int dim,
                                 const double[::1] symtab, int sym_kind) nogil:
    cdef double theta, pos, frac
    cdef Py_ssize_t m, k
    if sym_kind == SYM_PAIR_C:
        if dx > 0:
            return symtab[0]
        if dx < 0:
            return symtab[1]
        return 0.5 * (symtab[0] + symtab[1])
    theta = fmod(atan2(dy, dx), TWO_PI)
    if theta < 0:
        theta += TWO_PI
    m = symtab.shape[0]
    pos = theta * (m / TWO_PI)
    if sym_kind == SYM_TABLE_NEAREST_C:
        k = <Py_ssize_t> rint(pos)
        k = k % m
        return symtab[k]
    k = <Py_ssize_t> floor(pos)
    frac = pos - floor(pos)
    k = k % m
    # one-sided form is exact on constant tables
    return symtab[k] + frac * (symtab[(k + 1) % m] - symtab[k])


def linear_sum(points, src, fvals, bpts, bsrc, symtab, int sym_kind,
               double alpha, double exclusion):
    cdef const double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] s = np.ascontiguousarray(src, dtype=np.float64)
    cdef const double[::1] f = np.ascontiguousarray(fvals, dtype=np.float64)
    cdef const double[::1] tab = np.ascontiguousarray(symtab, dtype=np.float64)
    cdef bint combined = bpts is not None
    cdef const double[::1] bp
    cdef const double[::1] bs
    cdef Py_ssize_t n_pts = p.shape[0]
    cdef Py_ssize_t n_src = s.shape[0]
    cdef int dim = <int> p.shape[1]
    out_arr = np.zeros(n_pts)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double dx, dy, r, w, acc, bpi
    cdef double expo = alpha - dim
    cdef int fast = 1 if expo == -1.0 else (2 if expo == -2.0 else 0)
    cdef double radial
    if n_src == 0:
        return out_arr
    if combined:
        bp = np.ascontiguousarray(bpts, dtype=np.float64)
        bs = np.ascontiguousarray(bsrc, dtype=np.float64)
    with nogil:
        for i in range(n_pts):
            acc = 0.0
            bpi = bp[i] if combined else 0.0
            for j in range(n_src):
                dx = p[i, 0] - s[j, 0]
                dy = p[i, 1] - s[j, 1] if dim == 2 else 0.0
                r = sqrt(dx * dx + dy * dy)
                if r <= exclusion:
                    continue
                if fast == 1:
                    radial = 1.0 / r
                elif fast == 2:
                    radial = 1.0 / (r * r)
                else:
                    radial = pow(r, expo)
                w = _omega_scalar(dx, dy, dim, tab, sym_kind) * radial
                if combined:
                    w *= bpi - bs[j]
                acc += w * f[j]
            out[i] = acc
    return out_arr


def bilinear_sum(points, bpts, y1, f1, b1, y2, f2, b2,
                 double alpha, double exclusion, int slot):
    cdef const double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] a1 = np.ascontiguousarray(y1, dtype=np.float64)
    cdef const double[:, ::1] a2 = np.ascontiguousarray(y2, dtype=np.float64)
    cdef const double[::1] g1 = np.ascontiguousarray(f1, dtype=np.float64)
    cdef const double[::1] g2 = np.ascontiguousarray(f2, dtype=np.float64)
    cdef const double[::1] bp
    cdef const double[::1] bb1
    cdef const double[::1] bb2
    cdef Py_ssize_t n_pts = p.shape[0]
    cdef Py_ssize_t m1 = a1.shape[0]
    cdef Py_ssize_t m2 = a2.shape[0]
    cdef int dim = <int> p.shape[1]
    out_arr = np.zeros(n_pts)
    cnt_arr = np.zeros(n_pts, dtype=np.int64)
    cdef double[::1] out = out_arr
    cdef cnp.int64_t[::1] cnt = cnt_arr
    cdef double e2 = exclusion * exclusion
    cdef double expo = 0.5 * (alpha - 2.0 * dim)
    cdef int fast = 1 if expo == -0.5 else (2 if expo == -1.0 else 0)
    cdef Py_ssize_t i, j, k
    cdef double dx, dy, r1sq, r2sq, ssum, kern, acc, w1, bpi
    cdef cnp.int64_t skipped
    if slot != 0:
        bp = np.ascontiguousarray(bpts, dtype=np.float64)
    if slot == 1:
        bb1 = np.ascontiguousarray(b1, dtype=np.float64)
    elif slot == 2:
        bb2 = np.ascontiguousarray(b2, dtype=np.float64)
    with nogil:
        for i in range(n_pts):
            acc = 0.0
            skipped = 0
            bpi = bp[i] if slot != 0 else 0.0
            for j in range(m1):
                dx = a1[j, 0] - p[i, 0]
                dy = a1[j, 1] - p[i, 1] if dim == 2 else 0.0
                r1sq = dx * dx + dy * dy
                w1 = g1[j]
                if slot == 1:
                    w1 *= bpi - bb1[j]
                for k in range(m2):
                    dx = a2[k, 0] - p[i, 0]
                    dy = a2[k, 1] - p[i, 1] if dim == 2 else 0.0
                    r2sq = dx * dx + dy * dy
                    if r1sq <= e2 and r2sq <= e2:
                        skipped += 1
                        continue
                    ssum = r1sq + r2sq
                    if fast == 1:
                        kern = 1.0 / sqrt(ssum)
                    elif fast == 2:
                        kern = 1.0 / ssum
                    else:
                        kern = pow(ssum, expo)
                    if slot == 2:
                        acc += w1 * (bpi - bb2[k]) * g2[k] * kern
                    else:
                        acc += w1 * g2[k] * kern
            out[i] = acc
            cnt[i] = skipped
    return out_arr, cnt_arr


def osc_reduce(diff_tab, shift_tab, int mode):
    if diff_tab.ndim == 1:
        return _osc_reduce_1d(np.ascontiguousarray(diff_tab, dtype=np.float64),
                              np.ascontiguousarray(shift_tab, dtype=np.float64), mode)
    return _osc_reduce_2d(np.ascontiguousarray(diff_tab, dtype=np.float64),
                          np.ascontiguousarray(shift_tab, dtype=np.float64), mode)


cdef double _osc_reduce_1d(const double[::1] diff_tab, const double[::1] shift_tab,
                           int mode):
    cdef Py_ssize_t n0 = shift_tab.shape[0]
    cdef Py_ssize_t i, j
    cdef double best = 0.0, total = 0.0, si, ref
    with nogil:
        for i in range(n0):
            ref = shift_tab[i]
            si = 0.0
            for j in range(n0):
                si += fabs(diff_tab[i + j] - ref)
            if si > best:
                best = si
            total += si
    return best if mode == 0 else total


cdef double _osc_reduce_2d(const double[:, ::1] diff_tab, const double[:, ::1] shift_tab,
                           int mode):
    cdef Py_ssize_t n0 = shift_tab.shape[0]
    cdef Py_ssize_t i, j, u, v
    cdef double best = 0.0, total = 0.0, si, ref
    with nogil:
        for i in range(n0):
            for j in range(n0):
                ref = shift_tab[i, j]
                si = 0.0
                for u in range(n0):
                    for v in range(n0):
                        si += fabs(diff_tab[i + u, j + v] - ref)
                if si > best:
                    best = si
                total += si
    return best if mode == 0 else total
