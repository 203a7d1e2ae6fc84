import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from intentmon import IntentFormula, IntentMonitor, Region, ValidationError, build_grid_map


@pytest.fixture(scope="module")
def grid():
    return build_grid_map(
        6, 6,
        regions=[Region("p0", (0, 0, 0, 0)), Region("p1", (5, 5, 5, 5))],
        stay_weight=None,
    )


def test_get_set_params_and_clone():
    est = IntentMonitor(beta=2.0, epsilon=0.1, n_sims=50)
    params = est.get_params()
    assert params["beta"] == 2.0
    assert params["epsilon"] == 0.1
    est.set_params(beta=3.0)
    assert est.beta == 3.0
    twin = clone(est)
    assert twin.get_params() == est.get_params()


def test_not_fitted(grid):
    est = IntentMonitor()
    with pytest.raises(NotFittedError):
        est.predict_proba([(0, 0)])


def test_fit_enumerates_hypotheses(grid):
    est = IntentMonitor().fit(grid)
    assert est.n_hypotheses_ == 4
    assert len(est.tables_) == 4
    assert est.hypothesis_labels_[0] == "G !p0 & G !p1"


def test_fit_with_explicit_hypotheses(grid):
    hyps = [
        IntentFormula(reach=frozenset({"p1"}), avoid=frozenset({"p0"})),
        IntentFormula(reach=frozenset({"p0"}), avoid=frozenset()),
    ]
    est = IntentMonitor().fit(grid, hypotheses=hyps)
    assert est.n_hypotheses_ == 2
    proba = est.predict_proba([(2, 2), (3, 3)])
    assert proba.shape == (2, 2)


def test_fit_rejects_unknown_propositions(grid):
    with pytest.raises(ValidationError):
        IntentMonitor().fit(grid, propositions=("nope",))


def test_predict_proba_rows_normalized(grid):
    est = IntentMonitor(seed=3).fit(grid)
    traj = [(2, 2), (3, 3), (4, 4), (5, 5)]
    proba = est.predict_proba(traj)
    assert proba.shape == (4, est.n_hypotheses_)
    assert np.allclose(proba.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(proba[0] == 1.0 / est.n_hypotheses_)


def test_predict_labels(grid):
    est = IntentMonitor().fit(grid)
    labels = est.predict([(2, 2), (3, 3), (4, 4), (5, 5), (5, 4), (5, 5)])
    assert len(labels) == 6
    assert all(label in est.hypothesis_labels_ for label in labels)
    # after walking into p1, hypotheses avoiding p1 cannot win
    assert "G !p1" not in labels[-1]


def test_forecast(grid):
    est = IntentMonitor(n_sims=60, seed=5, horizons=(2, 3)).fit(grid)
    dists = est.forecast([(2, 2), (3, 3)])
    assert [d.horizon for d in dists] == [2, 3]
    assert abs(sum(dists[0].prob.values()) - 1.0) < 1e-9
    again = est.forecast([(2, 2), (3, 3)])
    assert dists == again


def test_streaming_matches_batch(grid):
    est = IntentMonitor().fit(grid)
    traj = [(2, 2), (3, 2), (4, 2)]
    state = est.init_state(traj[0])
    for cell in traj[1:]:
        state = est.step(state, cell)
    assert np.array_equal(est.predict_proba(traj)[-1], state.posterior)
