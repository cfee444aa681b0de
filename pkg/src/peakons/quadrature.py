"""Globally adaptive Gauss-Kronrod (7/15) quadrature.

The integrand is called with a 1-D array of abscissae and must return an
array of the same shape, so a whole panel costs one vectorised call.
"""
from __future__ import annotations

import heapq

import numpy as np

# 15-point Kronrod nodes on [0, 1] (symmetric about 0) and weights
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WK_FULL = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (xk[1], xk[3], xk[5], xk[7])
_WG_FULL = np.zeros(15)
_WG_FULL[[1, 3, 5]] = _WG[:3]
_WG_FULL[[13, 11, 9]] = _WG[:3]
_WG_FULL[7] = _WG[3]


class QuadratureError(ArithmeticError):
    pass


def _panel(fn, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(fn(mid + half * _NODES), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError(f"non-finite integrand on [{a!r}, {b!r}]")
    k = half * float(vals @ _WK_FULL)
    g = half * float(vals @ _WG_FULL)
    return k, abs(k - g)


def gk_quad(fn, a: float, b: float, abs_tol: float = 1e-10, rel_tol: float = 1e-10,
            max_level: int = 60, max_panels: int = 5000) -> tuple[float, float]:
    """Integrate ``fn`` over [a, b]; returns (value, error estimate).

    Subdivision stops when the summed error estimate falls below
    ``max(abs_tol, rel_tol*|value|)``.  A panel refined past ``max_level``
    bisections raises QuadratureError.  ``b < a`` is allowed.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0, 0.0
    k, e = _panel(fn, a, b)
    heap = [(-e, a, b, k, e, 0)]
    total, err = k, e
    n_panels = 1
    while err > max(abs_tol, rel_tol * abs(total)):
        _, lo, hi, k, e, level = heapq.heappop(heap)
        if level >= max_level or n_panels >= max_panels:
            raise QuadratureError(
                f"no convergence on [{a!r}, {b!r}] (error {err:.3e}, level {level})")
        mid = 0.5 * (lo + hi)
        k1, e1 = _panel(fn, lo, mid)
        k2, e2 = _panel(fn, mid, hi)
        total += k1 + k2 - k
        err += e1 + e2 - e
        heapq.heappush(heap, (-e1, lo, mid, k1, e1, level + 1))
        heapq.heappush(heap, (-e2, mid, hi, k2, e2, level + 1))
        n_panels += 1
    # re-sum to avoid drift from the running updates
    total = sum(item[3] for item in heap)
    return total, err
