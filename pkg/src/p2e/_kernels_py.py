"""Pure-Python Horner kernels, vectorized over points with numpy.

Loop order and operation sequence match the compiled kernels, so both
backends produce the same rounding on the same inputs. The arrays are not
forced to float64, which lets :mod:`p2e.bench` run these loops on counting
scalars.
"""

import numpy as np


def _inner(coef, n, K, L, r, x):
    inner = None
    for k in range(K, -1, -1):
        acc = coef[n, k, L]
        for l in range(L - 1, -1, -1):
            acc = acc * x + coef[n, k, l]
        inner = acc if k == K else inner * r + acc
    return inner


def sinpow(coef, s, varrho, e2, N, K, L):
    out = None
    for n in range(N, -1, -1):
        inner = _inner(coef, n, K, L, varrho, e2)
        out = inner if n == N else out * s + inner
    return out


def fourier(coef, psi, varrho, e2, N, K, L, use_sin):
    c2 = np.cos(2.0 * psi)
    s2 = np.sin(2.0 * psi)
    sn = np.zeros_like(c2)
    cn = np.ones_like(c2)
    out = np.zeros_like(c2)
    for n in range(N + 1):
        out = out + (sn if use_sin else cn) * _inner(coef, n, K, L, varrho, e2)
        sn, cn = sn * c2 + cn * s2, cn * c2 - sn * s2
    return out


def inner_terms(coef, varrho, e2, N, K, L):
    cols = [_inner(coef, n, K, L, varrho, e2) + 0.0 * varrho for n in range(N + 1)]
    return np.stack(cols, axis=-1)
