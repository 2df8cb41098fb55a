"""Reference solver for phi and h straight from the foot-point geometry.

The normal angle is the root of

    G(phi) = sin(phi) cos(psi) - cos(phi) sin(psi) - c sin(phi) cos(phi) / w(phi),

with ``c = varrho * e2`` and ``w = sqrt(1 - e2 sin^2 phi)``. ``G`` is the
tangent-form equation multiplied through by ``cos(phi) cos(psi)``, which keeps
it bounded as ``phi`` approaches ``pi/2``. Nothing here depends on the series
code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

DEFAULT_TOL = 1e-14
MAX_ITER = 100


@dataclass(frozen=True)
class OracleResult:
    phi_star: float
    h_star: float
    iterations: int
    residual: float


def _coords(pt) -> tuple[float, float]:
    if hasattr(pt, "u"):
        return float(pt.u), float(pt.v)
    u, v = pt
    return float(u), float(v)


def inside_evolute(u: float, v: float, a: float, e2: float) -> bool:
    """True when ``(u, v)`` lies strictly inside the evolute of the ellipse."""
    if e2 == 0:
        return False
    b = a * math.sqrt(1.0 - e2)
    return (a * abs(u)) ** (2 / 3) + (b * abs(v)) ** (2 / 3) < (a * a * e2) ** (2 / 3)


def _g(phi: float, sp: float, cp: float, c: float, e2: float) -> tuple[float, float]:
    s, co = math.sin(phi), math.cos(phi)
    w = math.sqrt(1.0 - e2 * s * s)
    g = s * cp - co * sp - c * s * co / w
    dg = co * cp + s * sp - c * ((co * co - s * s) / w + e2 * (s * co) ** 2 / w**3)
    return g, dg


def _solve_folded(psi: float, c: float, e2: float, tol: float, max_iter: int) -> tuple[float, int, float]:
    """Root of ``G`` in ``[psi, pi/2]`` for a first-quadrant angle ``psi``."""
    sp, cp = math.sin(psi), math.cos(psi)
    lo, hi = psi, math.pi / 2
    phi = psi
    g, dg = _g(phi, sp, cp, c, e2)
    for it in range(1, max_iter + 1):
        if abs(g) <= tol:
            return phi, it - 1, abs(g)
        # G < 0 at psi and > 0 at pi/2 outside the evolute
        if g < 0:
            lo = phi
        else:
            hi = phi
        step = phi - g / dg if dg != 0 else math.nan
        phi = step if lo < step < hi else 0.5 * (lo + hi)
        g, dg = _g(phi, sp, cp, c, e2)
        if hi - lo <= 4 * math.ulp(hi):
            return phi, it, abs(g)
    if abs(g) <= tol:
        return phi, max_iter, abs(g)
    raise ConvergenceError(f"no convergence after {max_iter} iterations (|G| = {abs(g):.3e})")


def h_from_phi(pt, ell, phi_star: float) -> float:
    """Height above the ellipse along the normal at ``phi_star``."""
    u, v = _coords(pt)
    rho = math.hypot(u, v)
    psi = math.atan2(v, u)
    s = math.sin(phi_star)
    return rho * math.cos(phi_star - psi) - ell.a * math.sqrt(1.0 - ell.e2 * s * s)


def solve_phi(pt, ell, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> OracleResult:
    """Safeguarded Newton iteration for the normal angle through ``pt``.

    The point is folded into the first quadrant, solved there, and the
    result mirrored back. Points strictly inside the evolute have several
    normals and are rejected.

    Raises
    ------
    DomainError
        For the origin or a point inside the evolute.
    ConvergenceError
        If the iteration cap is reached without ``|G| <= tol``.
    """
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    u, v = _coords(pt)
    a, e2 = ell.a, ell.e2
    rho = math.hypot(u, v)
    if rho == 0:
        raise DomainError("the origin has no normal")
    if inside_evolute(u, v, a, e2):
        raise DomainError(f"point ({u}, {v}) lies inside the evolute; the normal is not unique")
    au, av = abs(u), abs(v)
    if au == 0:
        phi_f, iters, res = math.pi / 2, 0, 0.0
    elif av == 0:
        phi_f, iters, res = 0.0, 0, 0.0
    else:
        psi_f = math.atan2(av, au)
        phi_f, iters, res = _solve_folded(psi_f, (a / rho) * e2, e2, tol, max_iter)
    phi = phi_f
    if u < 0:
        phi = math.pi - phi
    if v < 0:
        phi = -phi
    if u < 0 and v == 0:
        phi = math.pi
    return OracleResult(phi, h_from_phi((u, v), ell, phi), iters, res)


def folded_phi(pt, ell, tol: float = DEFAULT_TOL) -> float:
    """Oracle normal angle for the mirror image of ``pt`` in the first quadrant."""
    u, v = _coords(pt)
    return solve_phi((abs(u), abs(v)), ell, tol).phi_star


def residual_pair(pt, ell, phi: float, h: float) -> tuple[float, float]:
    """Foot-point residuals of ``(phi, h)``, each divided by ``rho``."""
    u, v = _coords(pt)
    rho = math.hypot(u, v)
    s = math.sin(phi)
    n = ell.a / math.sqrt(1.0 - ell.e2 * s * s)
    r1 = u - (n + h) * math.cos(phi)
    r2 = v - ((1.0 - ell.e2) * n + h) * s
    return r1 / rho, r2 / rho
