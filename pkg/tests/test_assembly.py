import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlhomog import (CoefficientField, Grid1D, GridFunction, QuadratureSpec, assemble_form, constant,
                     energy_seminorm, l2_domain_norm, oracles, vd_norm)
from nlhomog._validation import ParameterError


@pytest.fixture(scope="module")
def small():
    """D = (-1/2, 1/2) with h = 1/4: four elements inside D."""
    return Grid1D.uniform(-0.5, 0.5, 0.25)


@pytest.fixture(scope="module")
def small_oracle(small):
    return oracles.dirichlet_form(small, lambda x, z: 1.0, 0.5)


def _asymmetric():
    return CoefficientField("function", symmetric=False,
                            func=lambda y, e: 1.5 + 0.5 * np.sin(2 * np.pi * y) + 0.3 * np.sin(2 * np.pi * (y - e)))


def test_symmetric(grid16, bench):
    A = assemble_form(grid16, bench, 0.25, 0.5)
    assert np.max(np.abs(A - A.T)) <= 1e-12 * np.max(np.abs(A))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_bilinear_in_theta(grid16, alpha):
    A1 = assemble_form(grid16, constant(1.0), None, alpha)
    A2 = assemble_form(grid16, constant(2.0), None, alpha)
    assert np.max(np.abs(A2 - 2 * A1)) <= 1e-13 * np.max(np.abs(A1))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_constants_annihilated(grid16, bench, alpha):
    A = assemble_form(grid16, bench, 0.125, alpha)
    assert np.max(np.abs(A @ np.ones(grid16.n_nodes))) <= 1e-12 * np.max(np.abs(A))


def test_symmetrization_invariance(grid16):
    th = _asymmetric()
    A = assemble_form(grid16, th, 0.25, 0.5)
    As = assemble_form(grid16, th.symmetric_part(), 0.25, 0.5)
    assert np.max(np.abs(A - As)) <= 1e-12 * np.max(np.abs(A))


def test_coercivity_sandwich(grid16, bench, rng):
    A1 = assemble_form(grid16, constant(1.0), None, 0.5)
    A = assemble_form(grid16, bench, 0.125, 0.5)
    for _ in range(50):
        v = rng.standard_normal(grid16.n_nodes) * grid16.interior
        q1, q = v @ A1 @ v, v @ A @ v
        assert q1 / bench.lam <= q * (1 + 1e-12)
        assert q <= bench.lam * q1 * (1 + 1e-12)


def test_quadrature_order_doubling(small, bench):
    base = QuadratureSpec()
    A = assemble_form(small, bench, 1.0, 0.5, base)
    B = assemble_form(small, bench, 1.0, 0.5, base.doubled())
    i = int(np.argmin(np.abs(small.nodes)))
    for j in (i, i + 1, i + 3):
        assert abs(A[i, j] - B[i, j]) <= 1e-8 * abs(B[i, j])


def test_matches_brute_force_quadrature(small, small_oracle):
    A = assemble_form(small, constant(1.0), None, 0.5)
    scale = np.maximum(np.abs(small_oracle), 1e-3 * np.abs(small_oracle).max())
    assert np.max(np.abs(A - small_oracle) / scale) <= 1e-6


def test_energy_of_hat(small, small_oracle):
    k = int(np.argmin(np.abs(small.nodes)))
    u = np.zeros(small.n_nodes)
    u[k] = 1.0
    assert energy_seminorm(GridFunction(small, u), 0.5) == pytest.approx(small_oracle[k, k], rel=1e-6)


def test_vd_norm_of_hat(small, small_oracle):
    k = int(np.argmin(np.abs(small.nodes)))
    u = np.zeros(small.n_nodes)
    u[k] = 1.7
    expected = np.sqrt(small.h * 2 / 3 * 1.7 ** 2 + 1.7 ** 2 * small_oracle[k, k])
    assert vd_norm(GridFunction(small, u), 0.5) == pytest.approx(expected, rel=1e-6)


def test_zero_and_constant_norms(grid16):
    zero = GridFunction(grid16, np.zeros(grid16.n_nodes))
    assert energy_seminorm(zero, 0.5) == 0.0
    assert vd_norm(zero, 0.5) == 0.0
    const = GridFunction(grid16, np.full(grid16.n_nodes, -3.0))
    assert energy_seminorm(const, 0.5) <= 1e-10
    assert vd_norm(const, 0.5) == pytest.approx(3.0 * np.sqrt(2.0), rel=1e-10)
    assert l2_domain_norm(const) == pytest.approx(3.0 * np.sqrt(2.0), rel=1e-14)


@given(st.floats(0.2, 5.0), st.floats(0.1, 1.9))
def test_energy_scales_quadratically(c, alpha):
    g = Grid1D.uniform(-1.0, 1.0, 0.25)
    u = np.sin(g.nodes) * g.closure
    e1 = energy_seminorm(GridFunction(g, u), alpha)
    ec = energy_seminorm(GridFunction(g, c * u), alpha)
    assert ec == pytest.approx(c * c * e1, rel=1e-10)


def test_rejects_non_field(grid16):
    with pytest.raises(ParameterError):
        assemble_form(grid16, lambda y, e: 1.0, None, 0.5)
    with pytest.raises(ParameterError):
        vd_norm(np.zeros(grid16.n_nodes), 0.5)
