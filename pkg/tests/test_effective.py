import numpy as np
import pytest
from scipy.integrate import quad

from nlhomog import (EffectiveModel, EffectiveSolver, Grid1D, GridFunction, HeterogeneousProblem, TorusGrid,
                     apply_F, compute_zeta, constant, solve_cell, solve_effective, solve_heterogeneous)
from nlhomog import oracles
from nlhomog._validation import ParameterError
from nlhomog.effective import difference_matrix, principal_value, to_csv


@pytest.fixture(scope="module")
def cell(bench):
    return solve_cell(bench, TorusGrid(64), 0.5)


def _zeta_field(grid, values_on_closure):
    v = np.zeros(grid.n_nodes)
    v[grid.closure] = values_on_closure
    return GridFunction(grid, v)


@pytest.mark.parametrize("alpha, expected", [(1.0, -1.0), (0.5, -0.8), (1.5, -2 / 1.5)])
def test_zeta_of_linear_at_center(grid16, alpha, expected):
    # (1/2) int_{-1}^{1} -z * z |z|^{-(3+alpha)/2} dz = -2 / (3 - alpha)
    zeta = compute_zeta(GridFunction(grid16, grid16.nodes.copy()), alpha)
    assert zeta(0.0) == pytest.approx(expected, rel=1e-12)


def test_zeta_of_constant_is_zero(grid16):
    zeta = compute_zeta(GridFunction(grid16, np.full(grid16.n_nodes, 4.2)), 0.5)
    assert np.max(np.abs(zeta.values)) <= 1e-12


def test_zeta_off_center_against_quadrature(grid16):
    alpha, x = 0.5, 0.375
    u = GridFunction(grid16, grid16.nodes ** 2)
    f = lambda z: -(u(z) - u(x)) * np.sign(z - x) * abs(z - x) ** (-(1 + alpha) / 2)
    # integrate node to node so every kink of the P1 interpolant is an endpoint
    knots = grid16.nodes[grid16.closure]
    ref = 0.5 * sum(quad(f, a, b, epsabs=1e-14, epsrel=1e-12)[0] for a, b in zip(knots[:-1], knots[1:]))
    assert compute_zeta(u, alpha)(x) == pytest.approx(ref, rel=1e-9)


def test_F_of_zero_and_constant(grid16):
    z0 = _zeta_field(grid16, 0.0)
    assert np.all(apply_F(z0, 0.5).values == 0.0)
    Fc = apply_F(_zeta_field(grid16, 2.0), 0.5)
    assert abs(Fc(0.0)) <= 1e-12


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_F_of_linear_at_center(grid16, alpha):
    xc = grid16.nodes[grid16.closure]
    F = apply_F(_zeta_field(grid16, xc), alpha)
    # int_{-1}^{1} z gamma(0, z) dz, an ordinary integral since z gamma is even
    ref = 2 * quad(lambda z: z ** ((1 - alpha) / 2), 0, 1)[0]
    assert F(0.0) == pytest.approx(ref, rel=1e-10)
    assert F(0.0) == pytest.approx(4 / (3 - alpha), rel=1e-12)


def test_F_of_even_field_is_odd(grid16):
    xc = grid16.nodes[grid16.closure]
    F = apply_F(_zeta_field(grid16, 1 - xc ** 2 + 0.3 * np.cos(3 * xc)), 0.5).values
    I = grid16.interior
    assert np.max(np.abs(F[I] + F[I][::-1])) <= 1e-8 * np.max(np.abs(F))


def test_closed_forms_against_oracle():
    xc = np.linspace(-0.75, 0.75, 4)
    w = np.array([0.3, -1.2, 0.8, 2.0])
    Q = difference_matrix(xc, 0.5) @ w
    ref = np.array([oracles.difference_integral(xc, w, i, 0.5) for i in range(4)])
    assert np.max(np.abs(Q - ref)) <= 1e-6 * np.max(np.abs(ref))
    pv = principal_value(xc[1:3], 0.5, -0.75, 0.75)
    ref = [oracles.principal_value_window(x, -0.75, 0.75, 0.5) for x in xc[1:3]]
    assert pv == pytest.approx(ref, rel=1e-6)


def test_a2_zero_reduces_to_constant_theta(grid16):
    model = EffectiveModel(1.3, 0.0, 0.5, grid16)
    u = solve_effective(model, 1.0, 0.0)
    ref = solve_heterogeneous(HeterogeneousProblem(grid16, constant(1.3), 1.0, 0.5))
    assert np.max(np.abs(u.values - ref.values)) <= 1e-10


def test_constants_preserved(grid16, cell):
    for sign in (1, -1):
        u = solve_effective(EffectiveModel.from_cell(cell, grid16, sign), 0.0, 2.5)
        assert np.max(np.abs(u.values - 2.5)) <= 1e-10


def test_linear_response_in_a2(grid16):
    base = solve_effective(EffectiveModel(1.0, 0.0, 0.5, grid16))
    d = [np.linalg.norm(solve_effective(EffectiveModel(1.0, a2, 0.5, grid16)).values - base.values)
         for a2 in (0.02, 0.01)]
    C = d[0] / 0.02
    assert d[1] <= 1.05 * C * 0.01
    assert d[1] >= 0.95 * C * 0.01


def test_h_refinement_self_consistency(cell):
    centers = [solve_effective(EffectiveModel.from_cell(cell, Grid1D.uniform(-1.0, 1.0, h), 1))(0.0)
               for h in (1 / 16, 1 / 32, 1 / 64, 1 / 128)]
    gaps = np.abs(np.diff(centers))
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] <= 2e-3 * abs(centers[-1])


def test_model_validation(grid16):
    with pytest.raises(ParameterError):
        EffectiveModel(-1.0, 0.0, 0.5, grid16)
    with pytest.raises(ParameterError):
        EffectiveModel(1.0, 0.1, 0.5, grid16, a2_sign=0)


def test_csv_and_estimator(cell):
    est = EffectiveSolver(h=1 / 16, a2_sign=-1)
    est.fit(cell)
    assert est.model_.a2_sign == -1
    text = to_csv(est.solution_, est.model_)
    assert text.startswith("# nlhomog effective v1\n# a1 = 1.0\n")
    assert est.predict(0.0) > 0
