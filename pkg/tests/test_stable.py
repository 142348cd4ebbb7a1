import numpy as np
import pytest
from scipy.stats import ks_2samp

from nlhomog import (Grid1D, StableExitTime, constant, mc_exit_time, mean_residence_time, residence_time_reference,
                     sample_stable_increment, stable_scale_constant, torsion_reference)
from nlhomog._validation import ParameterError
from nlhomog.stable import to_csv


def test_scale_constant_values():
    assert stable_scale_constant(1.0) == pytest.approx(np.pi, abs=1e-8)
    assert stable_scale_constant(0.5) == pytest.approx(2 * np.sqrt(2 * np.pi), abs=1e-6)
    for a in np.arange(0.25, 1.76, 0.25):
        assert np.isfinite(stable_scale_constant(float(a))) and stable_scale_constant(float(a)) > 0
    with pytest.raises(ParameterError):
        stable_scale_constant(2.0)


def test_torsion_reference_values():
    assert torsion_reference(1.0, 1.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert torsion_reference(0.5, 1.0, 0.0) == pytest.approx(2 / np.sqrt(np.pi), rel=1e-14)
    for a in (0.3, 1.0, 1.7):
        assert torsion_reference(a, 2.0, 2.0) == 0.0 and torsion_reference(a, 2.0, -2.0) == 0.0
    with pytest.raises(ParameterError):
        torsion_reference(1.0, 1.0, 1.5)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_zero_angle_gives_zero_increment(alpha):
    rng = np.random.default_rng(0)
    assert sample_stable_increment(alpha, 0.01, rng, angle=0.0, expo=1.0) == 0.0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_self_similarity(alpha):
    rng = np.random.default_rng(11)
    a = sample_stable_increment(alpha, 8e-3, rng, 100_000)
    b = 8 ** (1 / alpha) * sample_stable_increment(alpha, 1e-3, rng, 100_000)
    assert ks_2samp(a, b).pvalue > 0.01


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_symmetry(alpha):
    n = 100_000
    x = sample_stable_increment(alpha, 1e-3, np.random.default_rng(3), n)
    # sign test: the count above zero is Binomial(n, 1/2) under a zero median
    assert abs(np.sum(x > 0) - n / 2) <= 3 * np.sqrt(n) / 2


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_characteristic_function(alpha):
    n, dt = 200_000, 0.05
    x = sample_stable_increment(alpha, dt, np.random.default_rng(5), n)
    for xi in (0.5, 2.0, 5.0):
        expected = np.exp(-dt * stable_scale_constant(alpha) * xi ** alpha)
        assert np.mean(np.cos(xi * x)) == pytest.approx(expected, abs=4 / np.sqrt(n))


def test_outside_start_exits_immediately():
    for x0 in (-1.0, 1.0, 3.0):
        est = mc_exit_time(1.0, x0, n_paths=10)
        assert est.mean == 0.0 and est.stderr == 0.0


def test_deterministic_across_threads():
    a = mc_exit_time(1.0, 0.2, 1e-3, 20_000, seed=9, threads=1)
    b = mc_exit_time(1.0, 0.2, 1e-3, 20_000, seed=9, threads=4)
    c = mc_exit_time(1.0, 0.2, 1e-3, 20_000, seed=10, threads=1)
    assert a == b
    assert a.mean != c.mean


def test_dt_refinement_bias():
    ref = residence_time_reference(1.0)
    ests = [mc_exit_time(1.0, 0.0, dt, 20_000, seed=1) for dt in (1e-2, 1e-3, 1e-4)]
    bias = [abs(e.mean - ref) for e in ests]
    for (b0, e0), (b1, e1) in zip(zip(bias, ests), zip(bias[1:], ests[1:])):
        assert b1 <= b0 + 2 * np.hypot(e0.stderr, e1.stderr)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_agrees_with_solver(alpha):
    est = mc_exit_time(alpha, 0.0, 1e-4, 20_000, seed=2)
    solver = float(mean_residence_time(Grid1D.uniform(-1.0, 1.0, 2.0 ** -7), constant(1.0), 1.0, alpha)(0.0))
    for ref in (solver, residence_time_reference(alpha)):
        assert abs(est.mean - ref) <= 3 * est.stderr + 0.05 * ref


def test_boundary_decay():
    inner = mc_exit_time(1.0, 0.0, 1e-3, 20_000, seed=4)
    edge = mc_exit_time(1.0, 0.9, 1e-3, 20_000, seed=4)
    assert edge.mean + 3 * edge.stderr < inner.mean - 3 * inner.stderr


def test_invalid_arguments():
    with pytest.raises(ParameterError):
        mc_exit_time(1.0, 0.0, dt=0.0)
    with pytest.raises(ParameterError):
        mc_exit_time(1.0, 0.0, n_paths=0)
    with pytest.raises(ParameterError):
        mc_exit_time(1.0, 0.0, seed=-1)


def test_csv_and_estimator():
    est = StableExitTime(alpha=1.0, dt=1e-3, n_paths=2000, seed=0).fit([0.0, 2.0])
    means = est.predict()
    assert means[1] == 0.0 and means[0] > 0
    lines = to_csv(est.estimates_).splitlines()
    assert lines[0] == "alpha,x0,dt,n_paths,mean,stderr,reference,torsion_reference"
    row = lines[1].split(",")
    assert float(row[6]) == pytest.approx(1 / np.pi, rel=1e-9)
    assert float(row[7]) == pytest.approx(1.0, rel=1e-12)
