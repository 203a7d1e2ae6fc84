"""Scikit-learn style front-end for the intent monitor.

``fit`` does the expensive precomputation (shared product and per-hypothesis
cost tables for a map); ``predict_proba`` replays an observed trajectory and
returns the posterior over hypotheses after every observation;
``forecast`` adds the Monte-Carlo occupancy prediction from the end of the
trajectory.  Hyperparameters follow the sklearn convention (stored verbatim
in ``__init__``, fitted state in trailing-underscore attributes), so
``get_params``/``set_params``/``clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .evaluation import build_cost_tables
from .formulas import enumerate_hypotheses
from .inference import InferenceConfig, MonitorState, init_monitor, update_posterior
from .prediction import MODE_EXACT, PredictionConfig, predict_occupancy
from .validation import check_grid, check_propositions, check_trajectory_cells


class IntentMonitor(BaseEstimator):
    """Bayesian intent monitor with posterior-predictive position forecasts.

    Parameters
    ----------
    beta : float
        Rationality of the assumed move model (0 = uniform moves).
    epsilon : float
        Per-step uniform mixing weight, allowing intent changes.
    horizons : tuple of int
        Forecast horizons (steps ahead) used by :meth:`forecast`.
    n_sims : int
        Monte-Carlo rollouts per forecast.
    mode : str
        "exact-time" occupancy or "cumulative" visit-by-horizon.
    seed : int
        Base seed for the forecast rollouts.
    """

    def __init__(self, beta=1.0, epsilon=0.3, horizons=(5, 10, 15), n_sims=300,
                 mode=MODE_EXACT, seed=0):
        self.beta = beta
        self.epsilon = epsilon
        self.horizons = horizons
        self.n_sims = n_sims
        self.mode = mode
        self.seed = seed

    def fit(self, grid, hypotheses=None, propositions=None):
        """Precompute cost tables for a map and a hypothesis set.

        With no explicit hypotheses, enumerates all avoid/reach partitions of
        ``propositions`` (default: every region of the map).
        """
        grid = check_grid(grid)
        if hypotheses is None:
            props = check_propositions(grid, propositions or grid.propositions)
            hypotheses = enumerate_hypotheses(props)
        else:
            hypotheses = list(hypotheses)
            if propositions is None:
                propositions = sorted({p for h in hypotheses for p in h.propositions})
            props = check_propositions(grid, propositions)
        self.grid_ = grid
        self.config_ = InferenceConfig(
            propositions=props,
            hypotheses=tuple(hypotheses),
            beta=self.beta,
            epsilon=self.epsilon,
        )
        self.product_, self.tables_ = build_cost_tables(grid, self.config_)
        self.hypothesis_labels_ = [h.canonical for h in self.config_.hypotheses]
        self.n_hypotheses_ = len(self.hypothesis_labels_)
        return self

    def _check_fitted(self):
        if not hasattr(self, "config_"):
            raise NotFittedError("call fit(grid) before using this estimator")

    # -- streaming interface -------------------------------------------------

    def init_state(self, cell) -> MonitorState:
        self._check_fitted()
        return init_monitor(self.grid_, self.config_, self.tables_, cell)

    def step(self, state: MonitorState, cell) -> MonitorState:
        self._check_fitted()
        return update_posterior(state, cell, self.config_, self.tables_, self.grid_)

    # -- batch interface -------------------------------------------------------

    def _replay(self, trajectory) -> list[MonitorState]:
        cells = check_trajectory_cells(self.grid_, trajectory)
        states = [self.init_state(cells[0])]
        for cell in cells[1:]:
            states.append(self.step(states[-1], cell))
        return states

    def predict_proba(self, trajectory) -> np.ndarray:
        """Posterior over hypotheses after each observed cell, shape (T, H)."""
        self._check_fitted()
        return np.vstack([s.posterior for s in self._replay(trajectory)])

    def predict(self, trajectory) -> list[str]:
        """Most probable hypothesis (canonical formula) after each cell."""
        proba = self.predict_proba(trajectory)
        return [self.hypothesis_labels_[i] for i in proba.argmax(axis=1)]

    def forecast(self, trajectory, horizons=None):
        """Occupancy distributions forecast from the end of the trajectory."""
        self._check_fitted()
        state = self._replay(trajectory)[-1]
        config = PredictionConfig(
            horizons=tuple(horizons) if horizons is not None else tuple(self.horizons),
            n_sims=self.n_sims,
            seed=self.seed,
            mode=self.mode,
        )
        return predict_occupancy(state, config, self.config_, self.tables_, self.grid_)
