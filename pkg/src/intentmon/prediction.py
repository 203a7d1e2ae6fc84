"""Posterior-predictive Monte-Carlo forecasting of future positions.

Each rollout draws one intent from the monitor's current posterior (which
already carries the per-observation uniform mixing) and then follows that
intent's Boltzmann move model for the whole horizon, advancing the simulated
automaton state so goals reached inside the rollout stay reached.  Occupancy
estimates aggregate many such rollouts; simulation i uses the deterministic
sub-seed ``derive_seed(seed, i)`` so results are reproducible and
order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grid import Cell, GridMap
from .inference import InferenceConfig, MonitorState, move_distribution
from .seeding import derive_seed

MODE_EXACT = "exact-time"
MODE_CUMULATIVE = "cumulative"


@dataclass(frozen=True)
class PredictionConfig:
    horizons: tuple[int, ...] = (5, 10, 15)
    n_sims: int = 300
    seed: int = 0
    mode: str = MODE_EXACT

    def __post_init__(self):
        object.__setattr__(self, "horizons", tuple(int(h) for h in self.horizons))
        if not self.horizons or any(h < 1 for h in self.horizons):
            raise ValidationError(f"horizons must be >= 1, got {self.horizons}")
        if self.n_sims < 1:
            raise ValidationError(f"n_sims must be >= 1, got {self.n_sims}")
        if self.mode not in (MODE_EXACT, MODE_CUMULATIVE):
            raise ValidationError(f"mode must be {MODE_EXACT!r} or {MODE_CUMULATIVE!r}")


@dataclass(frozen=True)
class OccupancyDistribution:
    """Estimated probability per cell at (or by) horizon ``t + h``."""

    horizon: int
    mode: str
    prob: dict[Cell, float]

    def probability(self, cell: Cell) -> float:
        return self.prob.get(tuple(cell), 0.0)


def _draw(cumulative: np.ndarray, u: float) -> int:
    index = int(np.searchsorted(cumulative, u, side="right"))
    return min(index, len(cumulative) - 1)


def _rollout(
    grid: GridMap,
    cost_tables,
    tracked: frozenset[str],
    beta: float,
    posterior_cum: np.ndarray,
    cell: Cell,
    visited: frozenset[str],
    horizon: int,
    rng: np.random.Generator,
    cache: dict | None,
) -> list[Cell]:
    intent = _draw(posterior_cum, rng.random())
    path = []
    for _ in range(horizon):
        key = (intent, visited, cell)
        entry = cache.get(key) if cache is not None else None
        if entry is None:
            cells, probs = move_distribution(grid, cost_tables[intent], visited, cell, beta)
            entry = (cells, np.cumsum(probs))
            if cache is not None:
                cache[key] = entry
        cells, cumulative = entry
        if not cells:  # isolated cell: nowhere to go, hold position
            path.append(cell)
            continue
        cell = cells[_draw(cumulative, rng.random())]
        visited = visited | (grid.label_of(cell) & tracked)
        path.append(cell)
    return path


def sample_trajectory(
    state: MonitorState,
    horizon: int,
    config: InferenceConfig,
    cost_tables,
    grid: GridMap,
    rng: np.random.Generator,
) -> list[Cell]:
    """One simulated future of ``horizon`` cells; fully determined by ``rng``.

    Draws an intent from the posterior, then draws each move from that
    intent's distribution over the neighbours of the current cell.
    """
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    return _rollout(
        grid,
        cost_tables,
        frozenset(config.propositions),
        config.beta,
        np.cumsum(state.posterior),
        state.cell,
        state.run_state,
        horizon,
        rng,
        cache=None,
    )


def predict_occupancy(
    state: MonitorState,
    config: PredictionConfig,
    inference: InferenceConfig,
    cost_tables,
    grid: GridMap,
) -> list[OccupancyDistribution]:
    """Occupancy distributions for every configured horizon.

    All horizons share one batch of rollouts of length max(horizons).
    Exact-time mode counts the cell occupied at exactly t+h; cumulative mode
    counts cells visited at least once within the first h simulated steps.
    """
    h_max = max(config.horizons)
    posterior_cum = np.cumsum(state.posterior)
    tracked = frozenset(inference.propositions)
    cache: dict = {}
    paths = []
    for i in range(config.n_sims):
        rng = np.random.default_rng(derive_seed(config.seed, i))
        paths.append(
            _rollout(
                grid,
                cost_tables,
                tracked,
                inference.beta,
                posterior_cum,
                state.cell,
                state.run_state,
                h_max,
                rng,
                cache,
            )
        )

    out = []
    for h in config.horizons:
        counts: dict[Cell, int] = {}
        if config.mode == MODE_EXACT:
            for path in paths:
                counts[path[h - 1]] = counts.get(path[h - 1], 0) + 1
        else:
            for path in paths:
                for cell in set(path[:h]):
                    counts[cell] = counts.get(cell, 0) + 1
        ordered = sorted(counts, key=grid.cell_index)
        prob = {cell: counts[cell] / config.n_sims for cell in ordered}
        out.append(OccupancyDistribution(horizon=h, mode=config.mode, prob=prob))
    return out


def prediction_correct(
    dist: OccupancyDistribution, truth: Cell, threshold: float = 0.01
) -> bool:
    """True iff the ground-truth cell received probability >= threshold."""
    if dist.mode != MODE_EXACT:
        raise ValidationError("prediction_correct applies to exact-time distributions")
    return dist.probability(truth) >= threshold
