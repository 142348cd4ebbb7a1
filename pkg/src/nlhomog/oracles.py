"""Brute-force adaptive-quadrature references for small grids.

These integrate the defining double integrals directly with nested
``scipy.integrate.quad_vec`` calls over vector-valued integrands (all basis
functions at once). They share no code with the element-pair assembly and are
meant for grids of a handful of elements only.
"""

import numpy as np
from scipy.integrate import quad, quad_vec

from .kernels import antiderivative_power

_TOL = dict(epsabs=1e-11, epsrel=1e-9, limit=400, norm="max")


def _hats(grid, z):
    """Values of every nodal basis function at ``z``; end functions continue as 1."""
    v = np.clip(1.0 - np.abs(z - grid.nodes) / grid.h, 0.0, 1.0)
    if z <= grid.left_end:
        v[0] = 1.0
    if z >= grid.right_end:
        v[-1] = 1.0
    return v


def dirichlet_form(grid, theta_s, alpha, tail_average=None):
    """``1/2 iint_{R^2 minus D^c x D^c} Theta (phi_i(x)-phi_i(z))(phi_j(x)-phi_j(z)) |x-z|^{-1-alpha}``.

    ``theta_s(x, z)`` is the symmetric coefficient in physical coordinates.
    Beyond the truncation ends ``theta_s`` is replaced by ``tail_average(x)``
    when given (the convention of the assembled matrix).
    """
    nodes = grid.nodes
    dn = nodes[grid.closure]

    def inner(x):
        px = _hats(grid, x)

        def f(z):
            if z == x:
                return np.zeros((px.size, px.size))
            d = px - _hats(grid, z)
            half = 0.5 if grid.d_left <= z <= grid.d_right else 1.0
            return (half * theta_s(x, z) * abs(x - z) ** (-1.0 - alpha)) * np.outer(d, d)

        tot = _split_at(f, x, nodes)
        # the hat vector is constant beyond each truncation end
        for a, b, end in ((-np.inf, nodes[0], 0), (nodes[-1], np.inf, -1)):
            w = tail_average(x) if tail_average is not None else None
            weight = quad(lambda z: (w if w is not None else theta_s(x, z)) * abs(x - z) ** (-1.0 - alpha),
                          a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
            d = px - _hats(grid, nodes[end])
            tot += weight * np.outer(d, d)
        return tot

    return sum(_smoothstep(inner, a, b) for a, b in zip(dn[:-1], dn[1:]))


def _split_at(f, x, breaks):
    """``int f`` over ``[breaks[0], breaks[-1]]`` with ``z = x +- u^2`` on each side of ``x``.

    The substitution softens the algebraic singularity at ``z = x``; the
    remaining breakpoints are mapped along.
    """
    tot = 0.0
    for sign, end in ((1.0, breaks[-1]), (-1.0, breaks[0])):
        length = sign * (end - x)
        if length <= 0:
            continue
        pts = [np.sqrt(sign * (b - x)) for b in breaks if 0 < sign * (b - x) < length]
        tot = tot + quad_vec(lambda u: 2.0 * u * f(x + sign * u * u), 0.0, np.sqrt(length),
                             points=pts or None, **_TOL)[0]
    return tot


def _smoothstep(g, a, b):
    """``int_a^b g`` after ``x = a + (b - a)(3t^2 - 2t^3)``, flattening both endpoints."""
    return quad_vec(lambda t: 6.0 * t * (1.0 - t) * (b - a) * g(a + (b - a) * t * t * (3.0 - 2.0 * t)),
                    0.0, 1.0, **_TOL)[0]

def _torus_hats(N, y):
    t = np.mod(y, 1.0) * N
    k = int(np.floor(t)) % N
    frac = t - np.floor(t)
    v = np.zeros(N)
    v[k] += 1.0 - frac
    v[(k + 1) % N] += frac
    return v


def _torus_inner(N, y, g):
    """``int_{-1/2}^{1/2} g(d) dd`` split at the nodes and at ``d = 0``."""
    pts = np.arange(-N, N + 1) / N - y
    breaks = np.unique(np.concatenate([[-0.5, 0.5], pts[(pts > -0.5) & (pts < 0.5)]]))
    return _split_at(g, 0.0, breaks)


def cell_form(N, theta_s, alpha):
    """``1/2 iint_{T^2} Theta (w(y)-w(eta))(v(y)-v(eta)) |y-eta|^{-1-alpha}`` with minimal-image distance."""
    def inner(y):
        py = _torus_hats(N, y)

        def g(d):
            if d == 0.0:
                return np.zeros((N, N))
            diff = py - _torus_hats(N, y + d)
            return 0.5 * theta_s(y, y + d) * np.outer(diff, diff) * abs(d) ** (-1.0 - alpha)

        return _torus_inner(N, y, g)

    return sum(_smoothstep(inner, k / N, (k + 1) / N) for k in range(N))


def cell_rhs(N, theta_s, alpha):
    """``b_i = iint_{T^2} Theta(y, eta) (-(phi_i(eta) - phi_i(y))) gamma(y, eta)``."""
    p = -(1.0 + alpha) / 2.0

    def inner(y):
        py = _torus_hats(N, y)

        def g(d):
            if d == 0.0:
                return np.zeros(N)
            return -theta_s(y, y + d) * (_torus_hats(N, y + d) - py) * np.sign(d) * abs(d) ** p

        return _torus_inner(N, y, g)

    return sum(_smoothstep(inner, k / N, (k + 1) / N) for k in range(N))


def difference_integral(xc, w, i, alpha):
    """``int_D (w(z) - w(x_i)) gamma(x_i, z) dz`` for the P1 interpolant of ``w`` on ``xc``."""
    p = -(1.0 + alpha) / 2.0
    x = xc[i]

    def f(z):
        r = z - x
        return 0.0 if r == 0 else (np.interp(z, xc, w) - w[i]) * np.sign(r) * abs(r) ** p

    return sum(quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0] for a, b in zip(xc[:-1], xc[1:]))


def principal_value_window(x, a, b, alpha):
    """``PV int_a^b gamma(x, z) dz``: the symmetric window about ``x`` cancels, the rest is integrated."""
    p = -(1.0 + alpha) / 2.0
    rho = min(x - a, b - x)
    if x - a > b - x:
        return -quad(lambda z: (x - z) ** p, a, x - rho, epsabs=1e-14, epsrel=1e-12)[0]
    if b - x > x - a:
        return quad(lambda z: (z - x) ** p, x + rho, b, epsabs=1e-14, epsrel=1e-12)[0]
    return 0.0


def power_integral(lo, hi, p):
    """``int_lo^hi t^p dt`` for ``0 < lo < hi``, closed form (used as a cross-check)."""
    return antiderivative_power(hi, p) - antiderivative_power(lo, p)
