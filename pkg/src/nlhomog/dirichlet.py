"""Volume-constrained heterogeneous problem and the mean residence time."""

import io
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg.lapack import dpocon
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import ParameterError, SolverError, check_alpha, check_positive
from .assembly import assemble_form
from .grid import Grid1D, GridFunction, QuadratureSpec

RCOND_MIN = 1e-15


def sample(data, x):
    """Evaluate a scalar, callable or nodal array at coordinates ``x``."""
    if callable(data):
        return np.asarray(data(x), dtype=float) * np.ones_like(x)
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 0:
        return np.full_like(x, float(arr))
    if arr.shape != x.shape:
        raise ParameterError(f"nodal data has shape {arr.shape}, expected {x.shape}")
    return arr


def check_far_field(g, grid):
    """``g`` must be constant on each side beyond the truncation ends."""
    if not callable(g):
        return
    for end in (grid.left_end, grid.right_end):
        probe = end * np.array([1.0, 1.5, 4.0, 100.0])
        vals = np.asarray(g(probe), dtype=float) * np.ones(4)
        if np.ptp(vals) > 1e-12 * max(1.0, np.max(np.abs(vals))):
            raise ParameterError("exterior datum must be constant beyond the truncation radius")


@dataclass(eq=False)
class HeterogeneousProblem:
    """Data of the volume-constrained problem ``A^eps u = f`` in D, ``u = g`` outside."""

    grid: Grid1D
    theta: object
    eps: float
    alpha: float
    source: object = 1.0
    exterior_datum: object = 0.0
    quad: QuadratureSpec = None

    def __post_init__(self):
        self.alpha = check_alpha(self.alpha)
        self.eps = check_positive(self.eps, "eps")
        self.quad = self.quad or QuadratureSpec()
        check_far_field(self.exterior_datum, self.grid)
        if self.grid.h > self.eps / 8 * (1 + 1e-12):
            warnings.warn(f"h = {self.grid.h:g} exceeds eps/8 = {self.eps / 8:g}; "
                          "the coefficient oscillation is under-resolved", stacklevel=2)


def load_vector(grid, source):
    """``(f, phi_i)`` with ``f`` sampled at the nodes of the closed domain."""
    f = np.zeros(grid.n_nodes)
    cl = grid.closure
    f[cl] = sample(source, grid.nodes[cl]) if not _is_nodal(source, grid) else np.asarray(source)[cl]
    return grid.mass_matrix() @ f


def _is_nodal(data, grid):
    return not callable(data) and np.ndim(data) == 1 and np.size(data) == grid.n_nodes


def solve_constrained(A, grid, F, g_values, symmetric=True):
    """Solve the interior rows of ``A u = F`` with ``u`` fixed to ``g_values`` outside D."""
    I = grid.interior
    E = ~I
    u = np.array(g_values, dtype=float)
    rhs = F[I] - A[np.ix_(I, E)] @ u[E]
    AII = A[np.ix_(I, I)]
    if symmetric:
        try:
            c, low = scipy.linalg.cho_factor(AII, lower=False)
        except scipy.linalg.LinAlgError as exc:
            raise SolverError(f"interior matrix is not positive definite: {exc}") from exc
        rcond, info = dpocon(c, np.linalg.norm(AII, 1))
        if info != 0 or rcond < RCOND_MIN:
            raise SolverError(f"interior matrix is ill-conditioned (rcond ~ {rcond:.3g})")
        uI = scipy.linalg.cho_solve((c, low), rhs)
    else:
        lu, piv = scipy.linalg.lu_factor(AII)
        diag = np.abs(np.diag(lu))
        rcond = diag.min() / diag.max()
        if not np.isfinite(rcond) or rcond < RCOND_MIN:
            raise SolverError(f"composed effective matrix is singular (pivot ratio {rcond:.3g})")
        uI = scipy.linalg.lu_solve((lu, piv), rhs)
    u[I] = uI
    res = np.linalg.norm(AII @ uI - rhs) / max(np.linalg.norm(rhs), np.finfo(float).tiny)
    return u, {"residual": float(res), "rcond": float(rcond)}


def exterior_values(grid, g):
    vals = np.zeros(grid.n_nodes)
    E = grid.exterior
    vals[E] = np.asarray(g)[E] if _is_nodal(g, grid) else sample(g, grid.nodes[E])
    return vals


def solve_heterogeneous(problem):
    """Weak solution ``u`` with ``u = g`` on exterior nodes and ``a^eps(u, phi_i) = (f, phi_i)``."""
    p = problem
    A = assemble_form(p.grid, p.theta, p.eps, p.alpha, p.quad)
    F = load_vector(p.grid, p.source)
    u, info = solve_constrained(A, p.grid, F, exterior_values(p.grid, p.exterior_datum))
    info.update(eps=p.eps, alpha=p.alpha)
    return GridFunction(p.grid, u, meta=info)


def mean_residence_time(grid, theta, eps, alpha, quad=None):
    """Unit source, zero exterior datum: the expected exit time from D."""
    return solve_heterogeneous(HeterogeneousProblem(grid, theta, eps, alpha, 1.0, 0.0, quad))


def to_csv(u, header=None):
    """``node,value,classification`` rows with a key-value comment header."""
    buf = io.StringIO()
    buf.write("# nlhomog solution v1\n")
    for k, v in (header or {}).items():
        buf.write(f"# {k} = {v}\n")
    buf.write("node,value,classification\n")
    for x, v, c in zip(u.grid.nodes, u.values, u.grid.classification()):
        buf.write(f"{x:.17g},{v:.17g},{c}\n")
    return buf.getvalue()


class NonlocalDirichletSolver(BaseEstimator):
    """Estimator front end for the heterogeneous volume-constrained problem.

    ``fit(theta, source=1, exterior=0)`` assembles and solves on a uniform grid
    over ``domain`` with spacing ``h``; ``predict(x)`` interpolates the solution.
    """

    def __init__(self, alpha=0.5, eps=0.125, h=None, domain=(-1.0, 1.0), margin=None, quad=None):
        self.alpha = alpha
        self.eps = eps
        self.h = h
        self.domain = domain
        self.margin = margin
        self.quad = quad

    def _grid(self):
        h = self.h if self.h is not None else self.eps / 8
        return Grid1D.uniform(self.domain[0], self.domain[1], h, margin=self.margin)

    def fit(self, theta, source=1.0, exterior=0.0):
        problem = HeterogeneousProblem(self._grid(), theta, self.eps, self.alpha,
                                       source, exterior, self.quad)
        self.solution_ = solve_heterogeneous(problem)
        return self

    def predict(self, x):
        check_is_fitted(self, "solution_")
        return self.solution_(np.asarray(x, dtype=float))
