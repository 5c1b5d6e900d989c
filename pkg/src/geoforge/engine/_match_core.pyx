# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled matching kernels (see _match_core_py for the reference API)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, fabs, fmod, hypot

cnp.import_array()

NAME = "cython"

cdef double PI = 3.141592653589793


cdef inline double _mod_pi(double v) nogil:
    cdef double r = fmod(v, PI)
    if r < 0.0:
        r += PI
    if r >= PI:
        r -= PI
    return r


def angle_table(xs, ys):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n), dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double a
    for i in range(n):
        for j in range(n):
            if i == j:
                out[i, j] = 0.0
            else:
                a = _mod_pi(atan2(y[j] - y[i], x[j] - x[i]))
                out[i, j] = a
    return out


def dist_table(xs, ys):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n), dtype=np.float64)
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            out[i, j] = hypot(x[j] - x[i], y[j] - y[i])
    return out


def eqangle_mask(ang, inst, double eps):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(ang, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] t = np.ascontiguousarray(inst, dtype=np.int32)
    cdef Py_ssize_t m = t.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(m, dtype=np.uint8)
    cdef Py_ssize_t i
    cdef double d1, d2, d
    for i in range(m):
        d1 = _mod_pi(a[t[i, 2], t[i, 3]] - a[t[i, 0], t[i, 1]])
        d2 = _mod_pi(a[t[i, 6], t[i, 7]] - a[t[i, 4], t[i, 5]])
        d = _mod_pi(fabs(d1 - d2))
        if PI - d < d:
            d = PI - d
        if d < eps:
            out[i] = 1
    return out


def eqratio_mask(dist, inst, double eps):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] s = np.ascontiguousarray(dist, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] t = np.ascontiguousarray(inst, dtype=np.int32)
    cdef Py_ssize_t m = t.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(m, dtype=np.uint8)
    cdef Py_ssize_t i
    cdef double ab, cd, ef, gh
    for i in range(m):
        ab = s[t[i, 0], t[i, 1]]
        cd = s[t[i, 2], t[i, 3]]
        ef = s[t[i, 4], t[i, 5]]
        gh = s[t[i, 6], t[i, 7]]
        if fabs(ab * gh - cd * ef) < eps:
            out[i] = 1
    return out
