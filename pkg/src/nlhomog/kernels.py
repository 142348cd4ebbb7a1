"""Two-point kernels and the nonlocal gradient ``D*`` in one space dimension."""

import numpy as np

from ._validation import ParameterError, SingularityError, check_alpha


def _check_offdiag(x, z):
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(x == z):
        raise SingularityError("kernel evaluated at x == z")
    return x, z


def kernel_gamma(x, z, alpha):
    """Antisymmetric kernel ``(z - x) |z - x|^{-(3 + alpha)/2}``."""
    alpha = check_alpha(alpha)
    x, z = _check_offdiag(x, z)
    d = z - x
    out = d * np.abs(d) ** (-(3.0 + alpha) / 2.0)
    return float(out) if out.ndim == 0 else out


def kernel_nu(x, z, alpha):
    """Jump kernel ``|x - z|^{-(1 + alpha)}``, the square of :func:`kernel_gamma`."""
    alpha = check_alpha(alpha)
    x, z = _check_offdiag(x, z)
    out = np.abs(z - x) ** (-(1.0 + alpha))
    return float(out) if out.ndim == 0 else out


def dstar_apply(u, x, z, alpha):
    """``D* u (x, z) = -(u(z) - u(x)) gamma(x, z)`` for a :class:`GridFunction` ``u``."""
    x_arr, z_arr = np.asarray(x, float), np.asarray(z, float)
    lo, hi = u.grid.left_end, u.grid.right_end
    if np.any((x_arr < lo) | (x_arr > hi) | (z_arr < lo) | (z_arr > hi)):
        raise ParameterError("D* evaluated outside the truncated interval")
    g = kernel_gamma(x_arr, z_arr, alpha)
    out = -(u(z_arr) - u(x_arr)) * g
    return float(out) if np.ndim(out) == 0 else out


def antiderivative_power(t, p):
    """Antiderivative of ``t^p`` on ``t > 0`` with the logarithmic branch at ``p = -1``."""
    t = np.asarray(t, dtype=float)
    if abs(p + 1.0) < 1e-14:
        return np.log(t)
    return t ** (p + 1.0) / (p + 1.0)
