import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlhomog import Grid1D, GridFunction, SingularityError, dstar_apply, kernel_gamma, kernel_nu
from nlhomog._validation import ParameterError

alphas = st.floats(0.05, 1.95)
coords = st.floats(-50, 50, allow_nan=False)


@pytest.mark.parametrize("x, z, alpha, expected", [(0, 1, 0.5, 1.0), (1, 0, 0.5, -1.0), (0, 4, 1.0, 0.25)])
def test_gamma_examples(x, z, alpha, expected):
    assert kernel_gamma(x, z, alpha) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("x, z, alpha, expected", [(0, 1, 0.3, 1.0), (0, 1, 1.7, 1.0), (0, 2, 1.0, 0.25),
                                                   (0, 0.5, 0.5, 2.828427124746190)])
def test_nu_examples(x, z, alpha, expected):
    assert kernel_nu(x, z, alpha) == pytest.approx(expected, rel=1e-14)


def test_diagonal_is_singular():
    with pytest.raises(SingularityError):
        kernel_gamma(0.3, 0.3, 0.5)
    with pytest.raises(SingularityError):
        kernel_nu(np.array([0.0, 1.0]), np.array([2.0, 1.0]), 1.0)


@pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0, float("nan"), True])
def test_alpha_out_of_range(alpha):
    with pytest.raises(ParameterError):
        kernel_gamma(0.0, 1.0, alpha)


def test_nu_is_gamma_squared_on_random_pairs(rng):
    x, z = rng.uniform(-5, 5, (2, 10_000))
    for alpha in (0.3, 1.0, 1.6):
        g = kernel_gamma(x, z, alpha)
        assert np.max(np.abs(kernel_nu(x, z, alpha) / g ** 2 - 1)) <= 1e-12
        assert np.array_equal(kernel_gamma(z, x, alpha), -g)


@given(coords, coords, alphas)
def test_gamma_antisymmetric(x, z, alpha):
    if x == z:
        return
    assert kernel_gamma(x, z, alpha) == -kernel_gamma(z, x, alpha)
    assert kernel_nu(x, z, alpha) == kernel_nu(z, x, alpha) > 0


def test_dstar_examples():
    grid = Grid1D.uniform(-1.0, 1.0, 0.25)
    const = GridFunction(grid, np.full(grid.n_nodes, 3.7))
    assert dstar_apply(const, -0.3, 0.8, 0.5) == 0.0
    linear = GridFunction(grid, grid.nodes.copy())
    assert dstar_apply(linear, 0.0, 1.0, 1.0) == pytest.approx(-1.0, rel=1e-15)
    k = int(np.argmin(np.abs(grid.nodes)))
    hat = np.zeros(grid.n_nodes)
    hat[k] = 2.5
    xk, xk2 = grid.nodes[k], grid.nodes[k + 2]
    # u(x_{k+2}) = 0 by independent interpolation, so D*u = u_k gamma
    assert np.interp(xk2, grid.nodes, hat) == 0.0
    expected = 2.5 * (xk2 - xk) * abs(xk2 - xk) ** (-(3 + 0.5) / 2)
    assert dstar_apply(GridFunction(grid, hat), xk, xk2, 0.5) == pytest.approx(expected, rel=1e-14)


def test_dstar_outside_truncation():
    grid = Grid1D.uniform(-1.0, 1.0, 0.25)
    u = GridFunction(grid, np.zeros(grid.n_nodes))
    with pytest.raises(ParameterError):
        dstar_apply(u, 0.0, grid.right_end + 0.1, 0.5)
    with pytest.raises(SingularityError):
        dstar_apply(u, 0.25, 0.25, 0.5)
