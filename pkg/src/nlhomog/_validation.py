"""Input validation helpers shared by the estimators and the functional API."""

import numbers

import numpy as np


class ParameterError(ValueError):
    """A scalar parameter is outside its admissible range."""


class CoefficientError(ValueError):
    """A coefficient field violates symmetry, periodicity or the lambda bounds."""


class SingularityError(ValueError):
    """A kernel was evaluated on the diagonal x == z."""


class SolverError(RuntimeError):
    """A linear system could not be solved to the requested accuracy."""


def check_alpha(alpha):
    """Return ``alpha`` as a float, raising unless ``0 < alpha < 2``."""
    if isinstance(alpha, bool) or not isinstance(alpha, numbers.Real):
        raise ParameterError(f"alpha must be a real number, got {alpha!r}")
    alpha = float(alpha)
    if not (0.0 < alpha < 2.0) or not np.isfinite(alpha):
        raise ParameterError(f"alpha must satisfy 0 < alpha < 2, got {alpha}")
    return alpha


def check_positive(value, name, *, integer=False, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ParameterError(f"{name} must be a number, got {value!r}")
    if integer and int(value) != value:
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if not np.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ParameterError(f"{name} must be {bound}, got {value!r}")
    return int(value) if integer else float(value)


def check_finite_array(values, name, size=None):
    arr = np.asarray(values, dtype=float)
    if size is not None and arr.shape != (size,):
        raise ParameterError(f"{name} must have shape ({size},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite values")
    return arr
