"""Nonlocal periodic homogenization lab in one dimension.

Heterogeneous volume-constrained solver, periodic cell problem, homogenized
effective model, two-scale remainder sweep and a Monte Carlo exit-time check.
"""

from ._validation import CoefficientError, ParameterError, SingularityError, SolverError
from .assembly import assemble_form, energy_seminorm, l2_domain_norm, vd_norm
from .cell import CellProblem, CellSolution, assemble_cell_form, assemble_cell_rhs, periodic_seminorm, solve_cell
from .coefficients import CoefficientField, benchmark_field, constant, trig_product
from .corrector import SweepReport, build_corrector, fit_rate, rate_sweep, residual_norm
from .dirichlet import HeterogeneousProblem, NonlocalDirichletSolver, mean_residence_time, solve_heterogeneous
from .effective import EffectiveModel, EffectiveSolver, apply_F, compute_zeta, solve_effective
from .grid import Grid1D, GridFunction, QuadratureSpec, TorusGrid
from .kernels import dstar_apply, kernel_gamma, kernel_nu
from .stable import (ExitTimeEstimate, StableExitTime, mc_exit_time, residence_time_reference,
                     sample_stable_increment, stable_scale_constant, torsion_reference)

__version__ = "0.1.0"

__all__ = [
    "CoefficientError", "ParameterError", "SingularityError", "SolverError",
    "assemble_form", "energy_seminorm", "l2_domain_norm", "vd_norm",
    "CellProblem", "CellSolution", "assemble_cell_form", "assemble_cell_rhs", "periodic_seminorm", "solve_cell",
    "CoefficientField", "benchmark_field", "constant", "trig_product",
    "SweepReport", "build_corrector", "fit_rate", "rate_sweep", "residual_norm",
    "HeterogeneousProblem", "NonlocalDirichletSolver", "mean_residence_time", "solve_heterogeneous",
    "EffectiveModel", "EffectiveSolver", "apply_F", "compute_zeta", "solve_effective",
    "Grid1D", "GridFunction", "QuadratureSpec", "TorusGrid",
    "dstar_apply", "kernel_gamma", "kernel_nu",
    "ExitTimeEstimate", "StableExitTime", "mc_exit_time", "residence_time_reference",
    "sample_stable_increment", "stable_scale_constant", "torsion_reference",
]
