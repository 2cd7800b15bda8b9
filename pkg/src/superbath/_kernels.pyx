# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Brillouin-zone sums.

Same contract as :mod:`superbath._kernels_py`; see ``lattice_sum`` there.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, M_PI

cnp.import_array()

BACKEND = "cython"


def lattice_sum(zs, int n, double delta, double J, int sign, int n1=0, int n2=0):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] z = np.ascontiguousarray(
        np.atleast_1d(np.asarray(zs, dtype=np.complex128)).ravel())
    cdef Py_ssize_t nz = z.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] val = np.zeros(nz, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] der = np.zeros(nz, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] row_v = np.zeros(nz, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] row_d = np.zeros(nz, dtype=np.complex128)
    cdef double[::1] c2 = np.empty(n)
    cdef double[::1] ca = np.empty(n)
    cdef double[::1] sa = np.empty(n)
    cdef double[::1] cb = np.empty(n)
    cdef double[::1] sb = np.empty(n)
    cdef double k, c, w, wu, wl, phase, d2 = delta * delta, j16 = 16.0 * J * J
    cdef double complex zz, a, b
    cdef Py_ssize_t i, j, q
    cdef double complex[::1] zv = z
    cdef double complex[::1] vv = val
    cdef double complex[::1] dv = der
    cdef double complex[::1] rv = row_v
    cdef double complex[::1] rd = row_d

    for i in range(n):
        k = 2.0 * M_PI * i / n - M_PI
        c = cos(0.5 * k)
        c2[i] = c * c
        ca[i] = cos(k * n1)
        sa[i] = sin(k * n1)
        cb[i] = cos(k * n2)
        sb[i] = sin(k * n2)

    with nogil:
        for i in range(n):
            for q in range(nz):
                rv[q] = 0.0
                rd[q] = 0.0
            for j in range(n):
                w = sqrt(d2 + j16 * c2[i] * c2[j])
                if w == 0.0:
                    wu = 1.0
                    wl = 0.0
                else:
                    wu = 0.5 * (w + delta) / w
                    wl = 0.5 * (w - delta) / w
                if sign < 0:
                    wu, wl = wl, wu
                phase = ca[i] * cb[j] - sa[i] * sb[j]
                for q in range(nz):
                    zz = zv[q]
                    a = 1.0 / (zz - w)
                    b = 1.0 / (zz + w)
                    rv[q] = rv[q] + phase * (wu * a + wl * b)
                    rd[q] = rd[q] - phase * (wu * a * a + wl * b * b)
            for q in range(nz):
                vv[q] = vv[q] + rv[q]
                dv[q] = dv[q] + rd[q]
    norm = 1.0 / (<double>n * n)
    return val * norm, der * norm
