# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled Horner kernels for batches of evaluation points."""

import numpy as np
from libc.math cimport sin, cos


cdef inline double _inner(const double[:, :, ::1] coef, int n, int K, int L,
                          double r, double x) noexcept nogil:
    cdef int k, l
    cdef double acc, inner = 0.0
    for k in range(K, -1, -1):
        acc = coef[n, k, L]
        for l in range(L - 1, -1, -1):
            acc = acc * x + coef[n, k, l]
        if k == K:
            inner = acc
        else:
            inner = inner * r + acc
    return inner


def sinpow(const double[:, :, ::1] coef, const double[::1] s, const double[::1] varrho,
           const double[::1] e2, int N, int K, int L):
    cdef Py_ssize_t m = s.shape[0], p
    cdef int n
    cdef double out, inner
    result = np.empty(m)
    cdef double[::1] res = result
    with nogil:
        for p in range(m):
            out = 0.0
            for n in range(N, -1, -1):
                inner = _inner(coef, n, K, L, varrho[p], e2[p])
                if n == N:
                    out = inner
                else:
                    out = out * s[p] + inner
            res[p] = out
    return result


def fourier(const double[:, :, ::1] coef, const double[::1] psi, const double[::1] varrho,
            const double[::1] e2, int N, int K, int L, bint use_sin):
    cdef Py_ssize_t m = psi.shape[0], p
    cdef int n
    cdef double out, c2, s2, sn, cn, tmp
    result = np.empty(m)
    cdef double[::1] res = result
    with nogil:
        for p in range(m):
            c2 = cos(2.0 * psi[p])
            s2 = sin(2.0 * psi[p])
            sn = 0.0
            cn = 1.0
            out = 0.0
            for n in range(N + 1):
                out += (sn if use_sin else cn) * _inner(coef, n, K, L, varrho[p], e2[p])
                tmp = sn * c2 + cn * s2
                cn = cn * c2 - sn * s2
                sn = tmp
            res[p] = out
    return result


def inner_terms(const double[:, :, ::1] coef, const double[::1] varrho, const double[::1] e2,
                int N, int K, int L):
    cdef Py_ssize_t m = varrho.shape[0], p
    cdef int n
    result = np.empty((m, N + 1))
    cdef double[:, ::1] res = result
    with nogil:
        for p in range(m):
            for n in range(N + 1):
                res[p, n] = _inner(coef, n, K, L, varrho[p], e2[p])
    return result
