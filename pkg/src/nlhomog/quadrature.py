"""One-dimensional quadrature rules on [0, 1]."""

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def gauss_jacobi(n, beta):
    """Nodes and weights for ``int_0^1 t^beta f(t) dt`` (weight included)."""
    x, w = roots_jacobi(n, 0.0, beta)
    return 0.5 * (x + 1.0), w * 2.0 ** (-beta - 1.0)


@lru_cache(maxsize=None)
def radial_rule(n, beta, levels=1, ratio=0.5):
    """Composite rule for ``int_0^1 rho^beta f(rho) d rho``.

    The innermost of ``levels`` geometrically graded panels carries the
    Gauss-Jacobi weight; the outer panels use Gauss-Legendre with the power
    folded into the weights.
    """
    edges = [0.0] + [ratio ** k for k in range(levels - 1, -1, -1)]
    pts, wts = [], []
    a, b = edges[0], edges[1]
    t, w = gauss_jacobi(n, beta)
    pts.append(b * t)
    wts.append(w * b ** (beta + 1.0))
    tl, wl = gauss_legendre(n)
    for a, b in zip(edges[1:-1], edges[2:]):
        r = a + (b - a) * tl
        pts.append(r)
        wts.append((b - a) * wl * r ** beta)
    return np.concatenate(pts), np.concatenate(wts)


@lru_cache(maxsize=None)
def triangle_rule(n):
    """Collapsed Gauss rule on the unit square split along its diagonal.

    Returns ``(xi, zeta, w)`` for the lower triangle ``zeta < xi``; swap the
    first two arrays for the upper one.
    """
    s, ws = gauss_legendre(n)
    t, wt = gauss_legendre(n)
    S, T = np.meshgrid(s, t, indexing="ij")
    W = np.outer(ws, wt) * S
    return S.ravel(), (S * T).ravel(), W.ravel()
