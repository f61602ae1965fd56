# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cubic-convolution kernel.

Mirrors ``_kernels_py.cubic_convolution`` operation for operation: the
product over vertices is formed left to right and each x keeps a Neumaier
compensated running sum over the shift index in increasing order.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def cubic_convolution(const double[:, ::1] fs, const int[:, ::1] add, const int[:, ::1] shifts):
    cdef Py_ssize_t nv = fs.shape[0]
    cdef Py_ssize_t n = fs.shape[1]
    cdef Py_ssize_t nt = shifts.shape[1]
    cdef Py_ssize_t T, x, v
    cdef double prod, s, t, c
    out = np.zeros(n, dtype=np.float64)
    comp = np.zeros(n, dtype=np.float64)
    cdef double[::1] total = out
    cdef double[::1] cmp = comp
    with nogil:
        for T in range(nt):
            for x in range(n):
                prod = fs[0, add[x, shifts[0, T]]]
                for v in range(1, nv):
                    prod = prod * fs[v, add[x, shifts[v, T]]]
                s = total[x]
                t = s + prod
                if fabs(s) >= fabs(prod):
                    c = (s - t) + prod
                else:
                    c = (prod - t) + s
                cmp[x] = cmp[x] + c
                total[x] = t
        for x in range(n):
            total[x] = (total[x] + cmp[x]) / <double>nt
    return out
