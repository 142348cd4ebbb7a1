import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlhomog import CoefficientError, CoefficientField, Grid1D, GridFunction, QuadratureSpec, TorusGrid, constant
from nlhomog._validation import ParameterError
from nlhomog.coefficients import trig_product


def test_uniform_grid_layout():
    g = Grid1D.uniform(-1.0, 1.0, 1 / 8)
    assert np.max(np.abs(np.diff(g.nodes) - g.h)) <= 1e-12 * g.h
    assert g.interior.sum() == 15
    assert np.isclose(g.nodes, -1.0).any() and np.isclose(g.nodes, 1.0).any()
    assert (g.nodes < -1.0).sum() >= 3 and (g.nodes > 1.0).sum() >= 3
    assert g.closure.sum() == 17
    assert set(g.classification()) == {"interior", "exterior"}


def test_grid_with_truncation_radius():
    g = Grid1D.uniform(-1.0, 1.0, 0.25, R=3.0)
    assert g.left_end <= -3.0 and g.right_end >= 3.0
    with pytest.raises(ParameterError):
        Grid1D.uniform(-1.0, 1.0, 0.25, R=0.5)


@pytest.mark.parametrize("args", [(-1.0, 1.0, 0.3), (1.0, -1.0, 0.25), (-1.0, 1.0, 0.0), (-1.0, 1.0, -0.5)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ParameterError):
        Grid1D.uniform(*args)


def test_grid_needs_exterior_nodes():
    with pytest.raises(ParameterError):
        Grid1D(-1.0, 1.0, 0.5, np.arange(-2.0, 2.01, 0.5))
    with pytest.raises(ParameterError):
        Grid1D(-1.0, 1.0, 0.5, np.array([-3.0, -2.5, -2.0, -1.5, -1.0, 0.0, 1.0, 1.5, 2.0, 2.5, 3.0]))


def test_gridfunction_rejects_nonfinite():
    g = Grid1D.uniform(-1.0, 1.0, 0.25)
    with pytest.raises(ParameterError):
        GridFunction(g, np.full(g.n_nodes, np.nan))
    with pytest.raises(ParameterError):
        GridFunction(g, np.zeros(g.n_nodes + 1))


def test_torus_grid():
    t = TorusGrid(8)
    assert np.array_equal(t.nodes, np.arange(8) / 8)
    for bad in (6, 9, 0):
        with pytest.raises(ParameterError):
            TorusGrid(bad)


@given(st.floats(-10, 10))
def test_torus_interpolation_is_periodic(y):
    t = TorusGrid(16)
    v = np.sin(2 * np.pi * t.nodes) + 0.3
    assert t.interpolate(v, y) == pytest.approx(t.interpolate(v, y + 3.0), abs=1e-12)


def test_quadrature_spec_validation():
    assert QuadratureSpec().doubled().gauss_order == 16
    with pytest.raises(ParameterError):
        QuadratureSpec(gauss_order=1)
    with pytest.raises(ParameterError):
        QuadratureSpec(duffy_refinement=0)


def test_trig_product_mean_and_bounds():
    th = trig_product(1.0, 0.9)
    assert th.mean() == pytest.approx(1.0, abs=1e-14)
    assert 1 / th.lam < 0.1 + 1e-9 and th.lam > 1.9
    assert th(0.25, 0.25) == pytest.approx(1.9)


@given(st.floats(0.1, 0.95), st.integers(1, 3))
def test_trig_product_is_symmetric_and_periodic(amp, k):
    th = trig_product(1.0, amp, k)
    y, e = np.meshgrid(np.linspace(0, 1, 13), np.linspace(0, 1, 13))
    assert np.allclose(th(y, e), th(e, y), atol=1e-14)
    assert np.allclose(th(y + 1, e), th(y, e - 2), atol=1e-12)


def test_coefficient_rejections():
    with pytest.raises(CoefficientError):
        constant(0.5, lam=1.5)
    with pytest.raises(CoefficientError):
        trig_product(1.0, 1.0)
    with pytest.raises(CoefficientError):
        CoefficientField("function", func=lambda y, e: 1 + 0.5 * np.sin(2 * np.pi * y))
    with pytest.raises(CoefficientError):
        CoefficientField("function", func=lambda y, e: 1.2 + 0.1 * y * e)
    with pytest.raises(ParameterError):
        CoefficientField("spline")


def test_symmetric_part():
    asym = CoefficientField("function", symmetric=False, func=lambda y, e: 1.5 + 0.4 * np.sin(2 * np.pi * (y - e)))
    s = asym.symmetric_part()
    assert s.symmetric
    assert np.allclose(s(0.1, 0.3), 1.5)


def test_gridded_table_bilinear():
    M = 4
    table = 1.0 + 0.2 * np.add.outer(np.cos(2 * np.pi * np.arange(M) / M), np.cos(2 * np.pi * np.arange(M) / M))
    th = CoefficientField("gridded-table", table=table)
    assert th(1 / 4, 2 / 4) == pytest.approx(table[1, 2])
    assert th(1 / 8, 0.0) == pytest.approx(0.5 * (table[0, 0] + table[1, 0]))
    assert th.mean() == pytest.approx(table.mean())
