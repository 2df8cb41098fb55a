"""Backend selection for the Horner kernels.

The compiled extension is used when it was built; setting the environment
variable ``P2E_PURE_PYTHON=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py as python_backend

try:
    if os.environ.get("P2E_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as compiled_backend
except ImportError:
    compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "compiled" if compiled_backend is not None else "python"


def _as_points(*arrays):
    # ascontiguousarray promotes 0-d input to 1-d, so take the shape first
    out = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in arrays))
    return [np.ascontiguousarray(a.ravel()) for a in out], out[0].shape


def sinpow(coef, s, varrho, e2, N, K, L, impl=None):
    impl = impl or backend
    (s, varrho, e2), shape = _as_points(s, varrho, e2)
    out = np.broadcast_to(np.asarray(impl.sinpow(coef, s, varrho, e2, N, K, L), dtype=np.float64), s.shape)
    return out.reshape(shape)


def fourier(coef, psi, varrho, e2, N, K, L, use_sin, impl=None):
    impl = impl or backend
    (psi, varrho, e2), shape = _as_points(psi, varrho, e2)
    return np.asarray(impl.fourier(coef, psi, varrho, e2, N, K, L, bool(use_sin))).reshape(shape)


def inner_terms(coef, varrho, e2, N, K, L, impl=None):
    impl = impl or backend
    (varrho, e2), shape = _as_points(varrho, e2)
    return np.asarray(impl.inner_terms(coef, varrho, e2, N, K, L)).reshape(shape + (N + 1,))
