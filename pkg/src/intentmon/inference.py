"""Bayesian intent inference over a hypothesis set.

The observation model is Boltzmann noisy rationality: from cell x the agent
moves to a neighbour c with probability proportional to
``exp(-beta * (w(x, c) + cost(c, hypothesis)))`` where the cost is the
remaining cost-to-acceptance at the advanced product state.  Each observed
move multiplies the prior by these likelihoods (Bayes), and the normalized
posterior is then mixed with a uniform distribution with weight epsilon so a
change of intent can be picked up later.

beta = 0 is a uniform choice among available moves; neighbours with infinite
cost contribute zero weight; if every neighbour is infinite the hypothesis's
motion model carries no information and falls back to uniform (the epsilon
floor then governs its posterior).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TrajectoryGapError, ValidationError
from .formulas import IntentFormula
from .grid import Cell, GridMap
from .product import CostTable


@dataclass(frozen=True)
class InferenceConfig:
    """Hypothesis set plus the two model constants.

    ``propositions`` fixes the enumeration/bit order the monitor tracks;
    every hypothesis must use only these propositions.
    """

    propositions: tuple[str, ...]
    hypotheses: tuple[IntentFormula, ...]
    beta: float = 1.0
    epsilon: float = 0.3

    def __post_init__(self):
        object.__setattr__(self, "propositions", tuple(self.propositions))
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        if self.beta < 0:
            raise ValidationError(f"beta must be >= 0, got {self.beta}")
        if not 0 <= self.epsilon <= 1:
            raise ValidationError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not self.hypotheses:
            raise ValidationError("hypothesis set must be non-empty")
        if len(set(self.hypotheses)) != len(self.hypotheses):
            raise ValidationError("hypotheses must be distinct")
        props = set(self.propositions)
        for h in self.hypotheses:
            if not h.propositions <= props:
                raise ValidationError(
                    f"hypothesis {h.canonical!r} uses propositions outside "
                    f"{sorted(props)}"
                )

    @property
    def n_hypotheses(self) -> int:
        return len(self.hypotheses)


@dataclass(frozen=True)
class MonitorState:
    """Monitor snapshot: position, automaton progress, posterior, step count."""

    cell: Cell
    run_state: frozenset[str]
    posterior: np.ndarray
    t: int
    anomaly: str | None = field(default=None, compare=False)

    def __post_init__(self):
        posterior = np.array(self.posterior, dtype=float)
        posterior.setflags(write=False)
        object.__setattr__(self, "posterior", posterior)


def move_distribution(
    grid: GridMap,
    cost_table: CostTable,
    run_state: frozenset[str],
    cell: Cell,
    beta: float,
    include_stay: bool = True,
) -> tuple[list[Cell], np.ndarray]:
    """Boltzmann distribution over the moves available from ``cell``.

    Returns the neighbour cells (row-major, self-loop included when the map
    has one unless ``include_stay`` is false) and their probabilities under
    the given hypothesis table.
    """
    moves = grid.neighbors(cell)
    if not include_stay:
        moves = [(c, w) for c, w in moves if c != cell]
    if not moves:
        return [], np.empty(0)
    cells = [c for c, _ in moves]
    totals = np.array(
        [w + cost_table.cost(c, run_state | grid.label_of(c)) for c, w in moves]
    )
    n = len(cells)
    finite = np.isfinite(totals)
    if beta == 0.0 or not finite.any():
        return cells, np.full(n, 1.0 / n)
    weights = np.zeros(n)
    lowest = totals[finite].min()  # rescaling cancels out; avoids underflow
    weights[finite] = np.exp(-beta * (totals[finite] - lowest))
    return cells, weights / math.fsum(weights)


def transition_likelihood(
    grid: GridMap,
    cost_table: CostTable,
    run_state: frozenset[str],
    x_t: Cell,
    x_next: Cell,
    beta: float,
) -> float:
    """Probability that a noisy-rational agent moves x_t -> x_next."""
    cells, probs = move_distribution(grid, cost_table, run_state, x_t, beta)
    x_next = grid.check_cell(x_next)
    try:
        index = cells.index(x_next)
    except ValueError:
        raise TrajectoryGapError(
            f"trajectory gap: {tuple(x_t)} -> {x_next} is not an available move"
        ) from None
    return float(probs[index])


def bayes_update(
    prior: np.ndarray, likelihoods: np.ndarray, epsilon: float
) -> tuple[np.ndarray, str | None]:
    """One posterior update: Bayes rule, then epsilon-mixing with uniform.

    If every hypothesis assigns zero likelihood the normalized posterior
    falls back to uniform and the anomaly is reported alongside the result.
    """
    prior = np.asarray(prior, dtype=float)
    likelihoods = np.asarray(likelihoods, dtype=float)
    n = len(prior)
    unnormalized = likelihoods * prior
    total = math.fsum(unnormalized)
    if total == 0.0:
        normalized = np.full(n, 1.0 / n)
        anomaly = "zero evidence: all hypotheses assign zero likelihood"
    else:
        normalized = unnormalized / total
        anomaly = None
    return (1.0 - epsilon) * normalized + epsilon / n, anomaly


def init_monitor(
    grid: GridMap,
    config: InferenceConfig,
    cost_tables,
    x0: Cell,
) -> MonitorState:
    """Fresh monitor: uniform prior, automaton fed the start cell's label."""
    if len(cost_tables) != len(config.hypotheses):
        raise ValidationError(
            f"need one cost table per hypothesis: got {len(cost_tables)} tables "
            f"for {len(config.hypotheses)} hypotheses"
        )
    x0 = grid.check_cell(x0)
    run_state = frozenset(grid.label_of(x0) & set(config.propositions))
    posterior = np.full(config.n_hypotheses, 1.0 / config.n_hypotheses)
    return MonitorState(cell=x0, run_state=run_state, posterior=posterior, t=0)


def update_posterior(
    state: MonitorState,
    x_next: Cell,
    config: InferenceConfig,
    cost_tables,
    grid: GridMap,
) -> MonitorState:
    """Advance the monitor by one observed move."""
    x_next = grid.check_cell(x_next)
    likelihoods = np.array(
        [
            transition_likelihood(grid, table, state.run_state, state.cell, x_next, config.beta)
            for table in cost_tables
        ]
    )
    posterior, anomaly = bayes_update(state.posterior, likelihoods, config.epsilon)
    run_state = state.run_state | (grid.label_of(x_next) & set(config.propositions))
    return MonitorState(
        cell=x_next,
        run_state=run_state,
        posterior=posterior,
        t=state.t + 1,
        anomaly=anomaly,
    )


def posterior_snapshot(
    state: MonitorState, config: InferenceConfig
) -> list[tuple[str, float]]:
    """Posterior as (canonical formula, probability) pairs in hypothesis order."""
    return [
        (h.canonical, float(p)) for h, p in zip(config.hypotheses, state.posterior)
    ]
