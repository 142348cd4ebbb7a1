import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from nlhomog import CellProblem, EffectiveSolver, NonlocalDirichletSolver, StableExitTime, constant

ESTIMATORS = [
    CellProblem(alpha=0.7, n_nodes=16),
    NonlocalDirichletSolver(alpha=0.7, eps=0.5, h=1 / 16),
    EffectiveSolver(h=1 / 16, a2_sign=-1),
    StableExitTime(alpha=0.7, n_paths=100, dt=1e-2),
]


@pytest.mark.parametrize("est", ESTIMATORS, ids=lambda e: type(e).__name__)
def test_params_round_trip(est):
    params = est.get_params()
    twin = clone(est)
    assert twin.get_params() == params
    twin.set_params(**params)
    assert repr(twin) == repr(est)


@pytest.mark.parametrize("est", ESTIMATORS, ids=lambda e: type(e).__name__)
def test_predict_before_fit(est):
    with pytest.raises(NotFittedError):
        clone(est).predict(np.array([0.0]))


def test_fit_returns_self_and_chains():
    cell = CellProblem(alpha=0.5, n_nodes=16).fit(constant(1.2))
    assert cell.a1_ == pytest.approx(1.2)
    eff = EffectiveSolver(h=1 / 16).fit(cell.solution_)
    ref = NonlocalDirichletSolver(alpha=0.5, eps=1.0, h=1 / 16).fit(constant(1.2))
    x = np.linspace(-1, 1, 9)
    assert np.max(np.abs(eff.predict(x) - ref.predict(x))) <= 1e-10
