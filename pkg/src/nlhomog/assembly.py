"""Galerkin assembly of the nonlocal form on a truncated line and the V^D norm."""

import weakref

import numpy as np

from ._pairs import ElementPairs
from ._validation import ParameterError, check_alpha, check_positive
from .coefficients import CoefficientField, constant
from .grid import GridFunction, QuadratureSpec
from .quadrature import gauss_legendre

_UNIT = constant(1.0)
_UNIT_FORMS = weakref.WeakKeyDictionary()


def scaled_theta(theta, eps):
    """Symmetric evaluator of ``Theta(x/eps, z/eps)`` (or ``Theta(x, z)`` when eps is None)."""
    if eps is None:
        return theta.symmetric_eval
    eps = check_positive(eps, "eps")
    return lambda x, z: theta.symmetric_eval(x / eps, z / eps)


def assemble_form(grid, theta, eps, alpha, quad=None):
    """Matrix of ``a(phi_i, phi_j)`` over every node of ``grid``.

    The integration domain is the plane minus exterior-exterior pairs. Beyond
    the truncation ends the outermost basis functions are continued by 1, so
    ``A @ ones == 0``; the far tail uses the closed-form integral of the
    kernel, weighted by the cell average of ``Theta`` in its second slot.
    """
    alpha = check_alpha(alpha)
    quad = quad or QuadratureSpec()
    if not isinstance(theta, CoefficientField):
        raise ParameterError("theta must be a CoefficientField")
    theta.check()
    theta_s = scaled_theta(theta, eps)
    active = grid.element_in_domain
    pairs = ElementPairs(grid.nodes[:-1], grid.h, theta_s, alpha, quad, active=active)
    A = pairs.form_matrix()
    _add_tail(A, grid, theta, eps, alpha, quad)
    return 0.5 * (A + A.T)


def _add_tail(A, grid, theta, eps, alpha, quad):
    t, w = gauss_legendre(quad.gauss_order)
    e = np.nonzero(grid.element_in_domain)[0]
    x = grid.nodes[e, None] + grid.h * t[None, :]
    avg = theta.average_second(x if eps is None else x / eps)
    wx = w[None, :] * grid.h
    psi = (1.0 - t, t)
    n_last = grid.n_nodes - 1
    for end_node, dist in ((0, x - grid.left_end), (n_last, grid.right_end - x)):
        tau = avg * dist ** (-alpha) / alpha * wx
        for a in range(2):
            for b in range(2):
                np.add.at(A, (e + a, e + b), tau @ (psi[a] * psi[b]))
            cross = tau @ psi[a]
            np.add.at(A, (e + a, np.full_like(e, end_node)), -cross)
            np.add.at(A, (np.full_like(e, end_node), e + a), -cross)
        A[end_node, end_node] += tau.sum()


def unit_form(grid, alpha, quad=None):
    """Cached ``Theta == 1`` matrix, whose quadratic form is ``E_D``."""
    alpha = check_alpha(alpha)
    quad = quad or QuadratureSpec()
    store = _UNIT_FORMS.setdefault(grid, {})
    key = (alpha, quad)
    if key not in store:
        store[key] = assemble_form(grid, _UNIT, None, alpha, quad)
    return store[key]


def energy_seminorm(u, alpha, quad=None):
    """``E_D(u, u)`` for a :class:`GridFunction`."""
    A1 = unit_form(u.grid, alpha, quad)
    return max(float(u.values @ A1 @ u.values), 0.0)


def l2_domain_norm(u):
    M = u.grid.mass_matrix()
    return float(np.sqrt(max(u.values @ M @ u.values, 0.0)))


def vd_norm(u, alpha, quad=None):
    """``sqrt(||u||_{L2(D)}^2 + E_D(u, u))``."""
    if not isinstance(u, GridFunction):
        raise ParameterError("vd_norm expects a GridFunction")
    return float(np.sqrt(l2_domain_norm(u) ** 2 + energy_seminorm(u, alpha, quad)))
