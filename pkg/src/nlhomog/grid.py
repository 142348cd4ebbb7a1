"""Uniform 1D grids on the truncated line and on the unit torus."""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import ParameterError, check_finite_array, check_positive

INTERIOR = "interior"
EXTERIOR = "exterior"


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature orders for element-pair integration.

    ``gauss_order`` is used for singular and near pairs, ``far_order`` for
    element pairs separated by more than ``far_field_threshold`` elements.
    ``duffy_refinement`` is the number of geometric radial panels used after
    the singularity-removing transform on identical and touching pairs.
    """

    gauss_order: int = 8
    duffy_refinement: int = 1
    far_field_threshold: int = 4
    far_order: int = 6

    def __post_init__(self):
        for name in ("gauss_order", "duffy_refinement", "far_field_threshold", "far_order"):
            check_positive(getattr(self, name), name, integer=True)
        if self.gauss_order < 2 or self.far_order < 2:
            raise ParameterError("quadrature orders must be >= 2")

    def doubled(self):
        return QuadratureSpec(2 * self.gauss_order, self.duffy_refinement,
                              self.far_field_threshold, 2 * self.far_order)


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Uniform partition of ``[left_end, right_end]`` containing ``D = (d_left, d_right)``.

    Use :meth:`uniform` to build one; the constructor only validates.
    """

    d_left: float
    d_right: float
    h: float
    nodes: np.ndarray
    dimension: int = 1

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ParameterError("grid needs at least two nodes")
        gaps = np.diff(nodes)
        if np.max(np.abs(gaps - self.h)) > 1e-12 * self.h:
            raise ParameterError("grid spacing is not uniform")
        tol = 1e-9 * self.h
        for end in (self.d_left, self.d_right):
            if np.min(np.abs(nodes - end)) > tol:
                raise ParameterError(f"domain endpoint {end} is not a grid node")
        n_left = int(np.sum(nodes < self.d_left - tol))
        n_right = int(np.sum(nodes > self.d_right + tol))
        # the boundary node itself is exterior, so 3 strictly outside + 1 on the boundary
        if n_left < 3 or n_right < 3:
            raise ParameterError("need at least 4 exterior nodes on each side of D")

    @classmethod
    def uniform(cls, d_left, d_right, h, margin=None, R=None):
        """Grid with spacing ``h`` covering ``D`` plus an exterior band.

        The band extends at least ``margin`` beyond each endpoint (default
        ``0.25 * |D|``), or far enough to cover ``[-R, R]`` when ``R`` is given.
        """
        h = check_positive(h, "h")
        if not d_right > d_left:
            raise ParameterError("d_right must exceed d_left")
        n_d = (d_right - d_left) / h
        if abs(n_d - round(n_d)) > 1e-8 * max(1.0, n_d):
            raise ParameterError("|D| must be an integer multiple of h")
        n_d = int(round(n_d))
        if R is not None:
            if R <= max(abs(d_left), abs(d_right)):
                raise ParameterError("R must exceed max(|d_left|, |d_right|)")
            n_l = math.ceil((d_left + R) / h - 1e-9)
            n_r = math.ceil((R - d_right) / h - 1e-9)
        else:
            margin = 0.25 * (d_right - d_left) if margin is None else margin
            n_l = n_r = math.ceil(margin / h - 1e-9)
        n_l, n_r = max(n_l, 4), max(n_r, 4)
        k = np.arange(-n_l, n_d + n_r + 1)
        nodes = d_left + h * k
        return cls(float(d_left), float(d_right), float(h), nodes)

    @property
    def n_nodes(self):
        return self.nodes.size

    @property
    def n_elements(self):
        return self.nodes.size - 1

    @property
    def left_end(self):
        return float(self.nodes[0])

    @property
    def right_end(self):
        return float(self.nodes[-1])

    @property
    def R(self):
        return max(-self.left_end, self.right_end)

    @property
    def measure(self):
        return self.d_right - self.d_left

    @property
    def interior(self):
        tol = 1e-9 * self.h
        return (self.nodes > self.d_left + tol) & (self.nodes < self.d_right - tol)

    @property
    def exterior(self):
        return ~self.interior

    @property
    def closure(self):
        """Nodes of the closed domain, boundary points included."""
        tol = 1e-9 * self.h
        return (self.nodes > self.d_left - tol) & (self.nodes < self.d_right + tol)

    @property
    def element_in_domain(self):
        mid = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        return (mid > self.d_left) & (mid < self.d_right)

    def classification(self):
        return np.where(self.interior, INTERIOR, EXTERIOR)

    def same_as(self, other):
        return (isinstance(other, Grid1D) and self.n_nodes == other.n_nodes
                and self.d_left == other.d_left and self.d_right == other.d_right
                and np.array_equal(self.nodes, other.nodes))

    def interpolate(self, values, x):
        """Piecewise-linear interpolant of nodal ``values`` at ``x``."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.left_end - 1e-12) or np.any(x > self.right_end + 1e-12):
            raise ParameterError("coordinate outside the truncated interval")
        return np.interp(x, self.nodes, values)

    def mass_matrix(self, domain_only=True):
        """Consistent P1 mass matrix, restricted to elements of D by default."""
        n = self.n_nodes
        mask = self.element_in_domain if domain_only else np.ones(self.n_elements, bool)
        M = np.zeros((n, n))
        e = np.nonzero(mask)[0]
        h = self.h
        np.add.at(M, (e, e), h / 3)
        np.add.at(M, (e + 1, e + 1), h / 3)
        np.add.at(M, (e, e + 1), h / 6)
        np.add.at(M, (e + 1, e), h / 6)
        return M


@dataclass(eq=False)
class GridFunction:
    """Nodal values of a continuous piecewise-linear function on a :class:`Grid1D`."""

    grid: Grid1D
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = check_finite_array(self.values, "values", self.grid.n_nodes)

    def __call__(self, x):
        return self.grid.interpolate(self.values, x)

    def __sub__(self, other):
        if not self.grid.same_as(other.grid):
            raise ParameterError("grid mismatch")
        return GridFunction(self.grid, self.values - other.values)

    @property
    def interior_values(self):
        return self.values[self.grid.interior]

    @property
    def exterior_values(self):
        return self.values[self.grid.exterior]


@dataclass(frozen=True)
class TorusGrid:
    """``N`` equispaced nodes ``k / N`` on the unit torus."""

    N: int

    def __post_init__(self):
        check_positive(self.N, "N", integer=True)
        if self.N < 8:
            raise ParameterError("torus grid needs N >= 8")
        if self.N % 2:
            raise ParameterError("torus grid needs an even N")

    @property
    def h(self):
        return 1.0 / self.N

    @property
    def nodes(self):
        return np.arange(self.N) / self.N

    def interpolate(self, values, y):
        """Periodic P1 interpolation of nodal ``values`` at ``y`` (taken mod 1)."""
        values = np.asarray(values, dtype=float)
        t = np.mod(np.asarray(y, dtype=float), 1.0) * self.N
        k = np.floor(t).astype(int)
        frac = t - k
        k %= self.N
        return (1.0 - frac) * values[k] + frac * values[(k + 1) % self.N]
