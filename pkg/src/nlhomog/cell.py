"""Periodic corrector problem on the unit torus and the effective coefficients."""

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._pairs import ElementPairs, fold_periodic
from ._validation import ParameterError, SolverError, check_alpha
from .coefficients import CoefficientField
from .grid import QuadratureSpec, TorusGrid

KERNELS = ("minimal-image", "restricted")


def _pairs(theta, grid, alpha, quad, kernel):
    if kernel not in KERNELS:
        raise ParameterError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    if not isinstance(theta, CoefficientField):
        raise ParameterError("theta must be a CoefficientField")
    theta.check()
    alpha = check_alpha(alpha)
    quad = quad or QuadratureSpec()
    return ElementPairs(grid.nodes, grid.h, theta.symmetric_eval, alpha, quad,
                        wrap=kernel == "minimal-image")


def assemble_cell_form(theta, grid, alpha, quad=None, kernel="minimal-image"):
    """``N x N`` matrix of ``1/2 iint Theta D*w D*v`` over the torus squared."""
    return fold_periodic(A=_pairs(theta, grid, alpha, quad, kernel).form_matrix())


def assemble_cell_rhs(theta, grid, alpha, quad=None, kernel="minimal-image"):
    """``b_i = iint Theta(y, eta) D*phi_i(y, eta)``."""
    return fold_periodic(b=_pairs(theta, grid, alpha, quad, kernel).dstar_load())


def periodic_seminorm(w, alpha, quad=None, kernel="minimal-image"):
    """``(iint |w(y) - w(eta)|^2 / |y - eta|^{1 + alpha})^{1/2}`` for periodic nodal ``w``."""
    from .coefficients import constant

    w = np.asarray(w, dtype=float)
    grid = TorusGrid(w.size)
    A = assemble_cell_form(constant(1.0), grid, alpha, quad, kernel)
    return float(np.sqrt(max(2.0 * w @ A @ w, 0.0)))


@dataclass
class CellSolution:
    """Corrector ``chi`` on a :class:`TorusGrid` together with ``a1`` and ``a2``."""

    grid: TorusGrid
    chi: np.ndarray
    a1: float
    a2: float
    mean_residual: float
    linear_residual: float
    alpha: float
    kernel: str = "minimal-image"
    meta: dict = field(default_factory=dict)

    @property
    def chi_max(self):
        return float(np.max(np.abs(self.chi)))

    def __call__(self, y):
        return self.grid.interpolate(self.chi, y)

    def to_csv(self):
        """Key-value header followed by ``node,chi`` rows."""
        buf = io.StringIO()
        buf.write("# nlhomog cell v1\n")
        header = {"N": self.grid.N, "alpha": self.alpha, "kernel": self.kernel,
                  "a1": self.a1, "a2": self.a2, "chi_max": self.chi_max,
                  "mean_residual": self.mean_residual, "linear_residual": self.linear_residual}
        for k, v in header.items():
            buf.write(f"# {k} = {_fmt(v)}\n")
        buf.write("node,chi\n")
        for y, c in zip(self.grid.nodes, self.chi):
            buf.write(f"{y:.17g},{c:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        header, rows = {}, []
        for line in text.splitlines():
            if line.startswith("#"):
                if "=" in line:
                    k, v = line[1:].split("=", 1)
                    header[k.strip()] = v.strip()
            elif line and not line.startswith("node"):
                rows.append([float(s) for s in line.split(",")])
        rows = np.array(rows)
        return cls(TorusGrid(int(header["N"])), rows[:, 1], float(header["a1"]),
                   float(header["a2"]), float(header["mean_residual"]),
                   float(header["linear_residual"]), float(header["alpha"]), header["kernel"])


def _fmt(v):
    return f"{v:.17g}" if isinstance(v, float) else str(v)


def solve_cell(theta, grid, alpha, quad=None, kernel="minimal-image"):
    """Mean-zero Galerkin corrector and the coefficients ``a1``, ``a2``."""
    alpha = check_alpha(alpha)
    pairs = _pairs(theta, grid, alpha, quad, kernel)
    A = fold_periodic(A=pairs.form_matrix())
    b = fold_periodic(b=pairs.dstar_load())
    n = grid.N
    K = np.zeros((n + 1, n + 1))
    K[:n, :n] = A
    K[:n, n] = K[n, :n] = 1.0
    rhs = np.concatenate([b, [0.0]])
    try:
        sol = scipy.linalg.solve(K, rhs, assume_a="sym")
    except scipy.linalg.LinAlgError as exc:
        raise SolverError(f"cell system is singular: {exc}") from exc
    chi = sol[:n]
    chi = chi - chi.mean()
    res = A @ chi - b
    res -= res.mean()
    bnorm = np.linalg.norm(b - b.mean())
    linear_residual = float(np.linalg.norm(res) / bnorm) if bnorm > 0 else float(np.linalg.norm(res))
    a1 = theta.mean()
    a2 = 0.5 * float(chi @ b)
    return CellSolution(grid, chi, float(a1), a2, float(abs(chi.mean())), linear_residual, alpha, kernel,
                        meta={"rhs_sum": float(b.sum())})


class CellProblem(BaseEstimator):
    """Estimator wrapper around :func:`solve_cell`.

    ``fit(theta)`` solves the corrector problem; ``predict(y)`` evaluates the
    periodic interpolant of ``chi``.
    """

    def __init__(self, alpha=0.5, n_nodes=64, quad=None, kernel="minimal-image"):
        self.alpha = alpha
        self.n_nodes = n_nodes
        self.quad = quad
        self.kernel = kernel

    def fit(self, theta, y=None):
        self.solution_ = solve_cell(theta, TorusGrid(self.n_nodes), self.alpha, self.quad, self.kernel)
        self.chi_ = self.solution_.chi
        self.a1_ = self.solution_.a1
        self.a2_ = self.solution_.a2
        return self

    def predict(self, y):
        check_is_fitted(self, "solution_")
        return self.solution_(y)
