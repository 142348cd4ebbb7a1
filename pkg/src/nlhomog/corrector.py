"""Two-scale approximation, its remainder in V^D and the convergence-rate sweep."""

import io
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import ParameterError, check_alpha, check_positive
from .assembly import l2_domain_norm, vd_norm
from .cell import solve_cell
from .dirichlet import HeterogeneousProblem, solve_heterogeneous
from .effective import EffectiveModel, compute_zeta, solve_effective
from .grid import Grid1D, GridFunction, QuadratureSpec, TorusGrid

SOLVER_TOL = 1e-10
A2_POLICIES = ("+1", "-1", "both")


def corrector_term(u0, cell, eps, alpha, fast=None):
    """``eps^{(1+alpha)/2} zeta(u0)(x) chi(x/eps)`` at interior nodes, zero elsewhere.

    ``fast`` overrides the fast variable ``x/eps`` at the interior nodes.
    """
    eps = check_positive(eps, "eps")
    alpha = check_alpha(alpha)
    grid = u0.grid
    zeta = compute_zeta(u0, alpha).values
    out = np.zeros(grid.n_nodes)
    I = grid.interior
    y = grid.nodes[I] / eps if fast is None else np.asarray(fast, dtype=float)
    out[I] = eps ** ((1.0 + alpha) / 2.0) * zeta[I] * cell(y)
    return out


def build_corrector(u0, cell, eps, alpha):
    """First-order field ``u0 - eps^{(1+alpha)/2} zeta(u0) chi(x/eps)``."""
    term = corrector_term(u0, cell, eps, alpha)
    return GridFunction(u0.grid, u0.values - term, meta={"eps": eps, "corrector_max": float(np.abs(term).max())})


def residual_norm(u_eps, approx, alpha, quad=None):
    """``||u_eps - approx||_{V^D}``; raises on grid mismatch."""
    return vd_norm(u_eps - approx, alpha, quad)


def fit_rate(points):
    """Least-squares line through ``(log eps, log norm)``: ``(slope, intercept, r_squared)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ParameterError("points must be a sequence of (eps, norm) pairs")
    if pts.shape[0] < 3:
        raise ParameterError(f"need at least 3 points to fit a rate, got {pts.shape[0]}")
    if not np.all(np.isfinite(pts)) or np.any(pts <= 0):
        raise ParameterError("rate fit needs finite positive eps and norms")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), float(r2)


@dataclass
class SweepEntry:
    eps: float
    h: float
    vd_norm_Z: float
    l2_norm_Z: float
    corrector_max: float = 0.0
    seconds: float = 0.0


@dataclass
class SweepReport:
    """Per-eps remainder norms for one ``a2_sign`` and the fitted rate."""

    entries: list
    a2_sign_used: int
    a1: float
    a2: float
    chi_max: float
    alpha: float
    slope: float = float("nan")
    intercept: float = float("nan")
    r_squared: float = float("nan")
    degenerate: bool = False
    control: dict = field(default_factory=dict)

    def __post_init__(self):
        self.entries = sorted(self.entries, key=lambda e: -e.eps)
        norms = [e.vd_norm_Z for e in self.entries]
        if max(norms, default=0.0) < 10 * SOLVER_TOL:
            self.degenerate = True
        elif len(self.entries) >= 3:
            self.slope, self.intercept, self.r_squared = fit_rate([(e.eps, e.vd_norm_Z) for e in self.entries])

    @property
    def control_change(self):
        return self.control.get("relative_change", float("nan"))

    def inversions(self):
        norms = [e.vd_norm_Z for e in self.entries]
        return sum(b > a for a, b in zip(norms, norms[1:]))

    def footer(self):
        return {"slope": self.slope, "intercept": self.intercept, "r_squared": self.r_squared,
                "a2_sign": self.a2_sign_used, "degenerate_fit": self.degenerate,
                "a1": self.a1, "a2": self.a2, "chi_max": self.chi_max, "alpha": self.alpha,
                "control_relative_change": self.control_change}

    def to_csv(self):
        buf = io.StringIO()
        buf.write("# nlhomog sweep v1\n")
        buf.write("eps,h,vd_norm_Z,l2_norm_Z,corrector_max\n")
        for e in self.entries:
            buf.write(f"{e.eps:.17g},{e.h:.17g},{e.vd_norm_Z:.17g},{e.l2_norm_Z:.17g},"
                      f"{e.corrector_max:.17g}\n")
        for k, v in self.footer().items():
            buf.write(f"# {k} = {v}\n")
        return buf.getvalue()

    def plot_script(self, csv_name):
        """gnuplot script drawing the log-log remainder against the fitted line."""
        fit = "" if self.degenerate else (
            f", exp({self.intercept:.12g})*x**({self.slope:.12g}) "
            f"title 'fit slope {self.slope:.3f}' dt 2")
        return (
            "set datafile separator ','\n"
            "set key autotitle columnhead\n"
            "set logscale xy\n"
            "set key left top\n"
            "set xlabel 'eps'\nset ylabel '||Z_eps||_{V^D}'\n"
            f"set title 'remainder, a2_sign = {self.a2_sign_used:+d}'\n"
            f"plot '{csv_name}' using 1:3 with linespoints title 'V^D norm', "
            f"'{csv_name}' using 1:4 with linespoints title 'L2 norm'{fit}\n"
        )


def _signs(policy):
    policy = str(policy)
    if policy not in A2_POLICIES:
        raise ParameterError(f"a2_sign policy must be one of {A2_POLICIES}, got {policy!r}")
    return (1, -1) if policy == "both" else (int(policy),)


def _one_eps(theta, cell, alpha, domain, source, exterior, eps, h, margin, quad, signs):
    start = time.perf_counter()
    grid = Grid1D.uniform(domain[0], domain[1], h, margin=margin)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # resolution already policed by the caller
        u_eps = solve_heterogeneous(HeterogeneousProblem(grid, theta, eps, alpha, source, exterior, quad))
    out = {}
    for s in signs:
        u0 = solve_effective(EffectiveModel.from_cell(cell, grid, s, quad), source, exterior)
        approx = build_corrector(u0, cell, eps, alpha)
        Z = u_eps - approx
        out[s] = SweepEntry(eps, h, vd_norm(Z, alpha, quad), l2_domain_norm(Z),
                            approx.meta["corrector_max"], time.perf_counter() - start)
    return out


def rate_sweep(theta, alpha, eps_list, domain=(-1.0, 1.0), source=1.0, exterior=0.0,
               h_factor=8, quad=None, a2_sign="both", cell_nodes=256, margin=None,
               control=True, force=False, progress=None, h=None):
    """Remainder norms over ``eps_list`` and the fitted rate, one report per ``a2_sign``.

    Each eps is solved on its own grid with ``h = eps / h_factor`` (or the
    fixed ``h`` when given). With
    ``control`` the smallest eps is repeated at ``h / 2`` and the relative
    change of the V^D remainder is recorded.
    """
    alpha = check_alpha(alpha)
    quad = quad or QuadratureSpec()
    signs = _signs(a2_sign)
    eps_list = sorted((check_positive(e, "eps") for e in eps_list), reverse=True)
    spacing = {e: (h if h is not None else e / h_factor) for e in eps_list}
    coarse = [e for e in eps_list if spacing[e] > e / 8 * (1 + 1e-9)]
    if coarse and not force:
        raise ParameterError(f"h = {spacing[coarse[0]]:g} violates the resolution rule h <= eps/8 "
                             f"at eps = {coarse[0]:g}; pass force to override")
    for e in eps_list:
        k = 1.0 / e
        if abs(k - round(k)) > 1e-9:
            raise ParameterError(f"1/eps must be an integer so cells tile D, got eps = {e}")
    cell = solve_cell(theta, TorusGrid(cell_nodes), alpha, quad)
    per_sign = {s: [] for s in signs}
    for e in eps_list:
        res = _one_eps(theta, cell, alpha, domain, source, exterior, e, spacing[e], margin, quad, signs)
        for s in signs:
            per_sign[s].append(res[s])
        if progress:
            progress(e, res)
    controls = {}
    if control and eps_list:
        e = eps_list[-1]
        res = _one_eps(theta, cell, alpha, domain, source, exterior, e, spacing[e] / 2, margin, quad, signs)
        for s in signs:
            base = per_sign[s][-1].vd_norm_Z
            half = res[s].vd_norm_Z
            change = abs(half - base) / base if base > 0 else float("inf")
            controls[s] = {"eps": e, "h": spacing[e] / 2, "vd_norm_Z": half, "relative_change": change}
    return {s: SweepReport(per_sign[s], s, cell.a1, cell.a2, cell.chi_max, alpha,
                           control=controls.get(s, {})) for s in signs}
