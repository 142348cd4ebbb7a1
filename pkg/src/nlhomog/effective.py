"""Homogenized model: ``a1`` times the fractional form plus the ``a2``-weighted term F.

Both nonlocal integrals act on P1 data over D and are evaluated in closed form
per element, so the only discretization error is the P1 interpolation itself.
With ``p = -(1 + alpha) / 2`` the kernel reads ``gamma(x, z) = sign(r) |r|^p``
for ``r = z - x``.
"""

import io
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import ParameterError, check_alpha
from .assembly import unit_form
from .dirichlet import check_far_field, exterior_values, load_vector, solve_constrained
from .grid import Grid1D, GridFunction, QuadratureSpec
from .kernels import antiderivative_power


def _power(alpha):
    return -(1.0 + alpha) / 2.0


def _odd_integral(lo, hi, p):
    """``int_lo^hi sign(r)|r|^p dr`` for intervals not containing 0."""
    a, b = np.abs(lo), np.abs(hi)
    return np.sign(hi + lo) * np.abs(antiderivative_power(np.maximum(a, b), p)
                                     - antiderivative_power(np.minimum(a, b), p))


def difference_matrix(xc, alpha):
    """``Q`` with ``(Q w)_i = int_D (w(z) - w(x_i)) gamma(x_i, z) dz`` for P1 ``w`` on ``xc``.

    ``xc`` are the uniformly spaced nodes of the closed domain.
    """
    p = _power(alpha)
    n = xc.size
    h = xc[1] - xc[0]
    r1 = xc[None, :-1] - xc[:, None]
    r2 = r1 + h
    far = (r1 > 0.5 * h) | (r2 < -0.5 * h)
    lo, hi = np.where(far, r1, 1.0), np.where(far, r2, 2.0)
    J0 = np.where(far, _odd_integral(lo, hi, p), 0.0)
    J1 = np.where(far, np.abs(antiderivative_power(np.abs(hi), p + 1)
                              - antiderivative_power(np.abs(lo), p + 1)), 0.0)
    left = (r2 * J0 - J1) / h
    right = (J1 - r1 * J0) / h
    Q = np.zeros((n, n))
    Q[:, :-1] += left
    Q[:, 1:] += right
    Q[np.arange(n), np.arange(n)] -= J0.sum(axis=1)
    # elements sharing x_i: (w(z) - w_i) is r times the slope
    c = h ** (p + 1) / (p + 2)
    i = np.arange(n)
    Q[i[1:], i[1:]] += c
    Q[i[1:], i[:-1]] -= c
    Q[i[:-1], i[:-1]] -= c
    Q[i[:-1], i[1:]] += c
    return Q


def principal_value(xc, alpha, a, b):
    """``PV int_a^b gamma(x, z) dz`` at each point of ``xc`` strictly inside (a, b)."""
    p = _power(alpha)
    return antiderivative_power(b - xc, p) - antiderivative_power(xc - a, p)


def zeta_matrix(grid, alpha):
    """Closure-node matrix of ``u -> (1/|D|) int_D D*u(x, z) dz``."""
    xc = grid.nodes[grid.closure]
    return -difference_matrix(xc, alpha) / grid.measure


def compute_zeta(u0, alpha):
    """Averaged flux ``zeta(u0)`` on the nodes of the closed domain (zero elsewhere)."""
    alpha = check_alpha(alpha)
    grid = u0.grid
    cl = grid.closure
    out = np.zeros(grid.n_nodes)
    out[cl] = zeta_matrix(grid, alpha) @ u0.values[cl]
    return GridFunction(grid, out, meta={"field": "zeta"})


def F_matrix(grid, alpha):
    """Interior-row matrix of ``zeta -> int_D (zeta(x) + zeta(z)) gamma(x, z) dz``.

    Columns index the closure nodes; rows the interior nodes. The odd part
    ``2 zeta(x) gamma`` is taken as a principal value in closed form.
    """
    cl = grid.closure
    xc = grid.nodes[cl]
    inner = grid.interior[cl]
    Q = difference_matrix(xc, alpha)[inner]
    pv = principal_value(xc[inner], alpha, grid.d_left, grid.d_right)
    Q[np.arange(Q.shape[0]), np.nonzero(inner)[0]] += 2.0 * pv
    return Q


def apply_F(zeta, alpha):
    """``F zeta`` at interior nodes for a nodal ``zeta`` defined on the closed domain."""
    alpha = check_alpha(alpha)
    grid = zeta.grid
    out = np.zeros(grid.n_nodes)
    out[grid.interior] = F_matrix(grid, alpha) @ zeta.values[grid.closure]
    return GridFunction(grid, out, meta={"field": "F"})


def composed_matrix(grid, alpha):
    """``B``: rows ``-h (F zeta(u))(x_i)`` at interior nodes, over all grid columns."""
    cl = grid.closure
    B = np.zeros((grid.n_nodes, grid.n_nodes))
    rows = np.nonzero(grid.interior)[0]
    block = -grid.h * (F_matrix(grid, alpha) @ zeta_matrix(grid, alpha))
    B[np.ix_(rows, np.nonzero(cl)[0])] = block
    return B


@dataclass(eq=False)
class EffectiveModel:
    """Coefficients and discretization of the homogenized problem."""

    a1: float
    a2: float
    alpha: float
    grid: Grid1D
    a2_sign: int = 1
    quad: QuadratureSpec = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.alpha = check_alpha(self.alpha)
        if not np.isfinite(self.a1) or self.a1 <= 0:
            raise ParameterError(f"a1 must be positive, got {self.a1}")
        if not np.isfinite(self.a2):
            raise ParameterError("a2 must be finite")
        if self.a2_sign not in (1, -1):
            raise ParameterError(f"a2_sign must be +1 or -1, got {self.a2_sign}")
        self.quad = self.quad or QuadratureSpec()

    @classmethod
    def from_cell(cls, cell, grid, a2_sign=1, quad=None):
        return cls(cell.a1, cell.a2, cell.alpha, grid, a2_sign, quad)

    def matrix(self):
        A = self.a1 * unit_form(self.grid, self.alpha, self.quad)
        if self.a2 != 0:
            A = A + (self.a2_sign * self.a2) * composed_matrix(self.grid, self.alpha)
        return A


def solve_effective(model, source=1.0, exterior=0.0):
    """Solve ``a1 A1 u + a2_sign a2 B u = (f, phi)`` with ``u = g`` outside D."""
    grid = model.grid
    check_far_field(exterior, grid)
    F = load_vector(grid, source)
    u, info = solve_constrained(model.matrix(), grid, F, exterior_values(grid, exterior),
                                symmetric=model.a2 == 0)
    info.update(a1=model.a1, a2=model.a2, a2_sign=model.a2_sign, alpha=model.alpha)
    return GridFunction(grid, u, meta=info)


def to_csv(u, model):
    buf = io.StringIO()
    buf.write("# nlhomog effective v1\n")
    for k, v in {"a1": model.a1, "a2": model.a2, "a2_sign": model.a2_sign,
                 "alpha": model.alpha, "h": model.grid.h}.items():
        buf.write(f"# {k} = {v!r}\n")
    buf.write("node,value,classification\n")
    for x, v, c in zip(u.grid.nodes, u.values, u.grid.classification()):
        buf.write(f"{x:.17g},{v:.17g},{c}\n")
    return buf.getvalue()


class EffectiveSolver(BaseEstimator):
    """Estimator for the homogenized problem; ``fit(cell)`` takes a solved cell problem."""

    def __init__(self, h=1 / 64, domain=(-1.0, 1.0), margin=None, a2_sign=1, quad=None):
        self.h = h
        self.domain = domain
        self.margin = margin
        self.a2_sign = a2_sign
        self.quad = quad

    def fit(self, cell, source=1.0, exterior=0.0):
        grid = Grid1D.uniform(self.domain[0], self.domain[1], self.h, margin=self.margin)
        self.model_ = EffectiveModel.from_cell(cell, grid, self.a2_sign, self.quad)
        self.solution_ = solve_effective(self.model_, source, exterior)
        return self

    def predict(self, x):
        check_is_fitted(self, "solution_")
        return self.solution_(np.asarray(x, dtype=float))
