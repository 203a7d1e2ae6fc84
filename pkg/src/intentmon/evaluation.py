"""End-to-end monitoring runs, accuracy experiments, and timing benchmarks."""

from __future__ import annotations

import json
import os
import platform
import statistics
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .automata import build_automaton, build_shared_automaton
from .errors import GenerationError, TrajectoryGapError, ValidationError
from .formulas import enumerate_hypotheses
from .grid import GridMap
from .inference import (
    InferenceConfig,
    MonitorState,
    init_monitor,
    posterior_snapshot,
    update_posterior,
)
from .prediction import (
    OccupancyDistribution,
    PredictionConfig,
    predict_occupancy,
    prediction_correct,
)
from .product import build_product, cost_to_accept, hypothesis_cost_table
from .scenarios import Scenario, Trajectory, generate_scenario, simulate_agent
from .seeding import derive_seed


def build_cost_tables(grid: GridMap, config: InferenceConfig):
    """Cost tables for every hypothesis, plus the shared product they use.

    Hypotheses that partition the tracked propositions share one product and
    get their tables by re-picking the accepting subset; any others fall back
    to a dedicated product each.
    """
    shared = build_product(grid, build_shared_automaton(config.propositions))
    props = set(config.propositions)
    tables = []
    for h in config.hypotheses:
        if h.reach | h.avoid == props:
            tables.append(hypothesis_cost_table(shared, h))
        else:
            tables.append(cost_to_accept(build_product(grid, build_automaton(h))))
    return shared, tables


@dataclass(frozen=True)
class MonitorStep:
    t: int
    state: MonitorState
    predictions: tuple[OccupancyDistribution, ...]
    anomaly: str | None = None


@dataclass
class MonitorRun:
    config: InferenceConfig
    steps: list[MonitorStep]
    timings: dict[str, float]

    def records(self) -> list[dict]:
        """JSON-lines-ready dicts, one per step (deterministic ordering)."""
        out = []
        for step in self.steps:
            record = {
                "t": step.t,
                "cell": [int(step.state.cell[0]), int(step.state.cell[1])],
                "posterior": dict(posterior_snapshot(step.state, self.config)),
            }
            if step.predictions:
                record["prediction"] = {
                    str(d.horizon): [
                        [int(c[0]), int(c[1]), p] for c, p in d.prob.items()
                    ]
                    for d in step.predictions
                }
            if step.anomaly:
                record["anomaly"] = step.anomaly
            out.append(record)
        return out


def run_monitor(
    grid: GridMap,
    config: InferenceConfig,
    trajectory: Trajectory,
    prediction: PredictionConfig | None = None,
    on_step=None,
) -> MonitorRun:
    """Replay a trajectory through the monitor.

    Builds the shared product and all hypothesis cost tables once, then per
    observed cell updates the posterior and (optionally) predicts occupancy
    at the configured horizons.  A non-adjacent jump is recorded as an
    anomaly and the monitor re-initializes at the offending cell.
    """
    if not trajectory.cells:
        raise ValidationError("empty trajectory")
    t0 = time.perf_counter()
    shared, tables = build_cost_tables(grid, config)
    t1 = time.perf_counter()

    def predict(step_index: int) -> tuple[OccupancyDistribution, ...]:
        if prediction is None:
            return ()
        per_step = replace(prediction, seed=derive_seed(prediction.seed, step_index))
        return tuple(predict_occupancy(state, per_step, config, tables, grid))

    inference_times: list[float] = []
    prediction_times: list[float] = []

    state = init_monitor(grid, config, tables, trajectory.cells[0])
    tp = time.perf_counter()
    steps = [MonitorStep(t=0, state=state, predictions=predict(0))]
    prediction_times.append(time.perf_counter() - tp)
    if on_step:
        on_step(steps[0])

    for t, cell in enumerate(trajectory.cells[1:], start=1):
        ti = time.perf_counter()
        anomaly = None
        try:
            state = update_posterior(state, cell, config, tables, grid)
            anomaly = state.anomaly
        except TrajectoryGapError as exc:
            state = init_monitor(grid, config, tables, cell)
            anomaly = f"monitor re-initialized: {exc}"
        inference_times.append(time.perf_counter() - ti)
        tp = time.perf_counter()
        predictions = predict(t)
        prediction_times.append(time.perf_counter() - tp)
        step = MonitorStep(t=t, state=state, predictions=predictions, anomaly=anomaly)
        steps.append(step)
        if on_step:
            on_step(step)

    timings = {
        "product_build_s": t1 - t0,
        "inference_step_s_median": statistics.median(inference_times) if inference_times else 0.0,
        "prediction_step_s_median": statistics.median(prediction_times) if prediction_times else 0.0,
    }
    return MonitorRun(config=config, steps=steps, timings=timings)


# -- reports ---------------------------------------------------------------------


def hardware_info() -> dict:
    return {
        "platform": platform.platform(),
        "machine": platform.machine(),
        "processor": platform.processor() or platform.machine(),
        "python": platform.python_version(),
        "cpu_count": os.cpu_count(),
    }


@dataclass
class EvalReport:
    """Shared report schema for accuracy experiments and benchmarks."""

    params: dict
    episodes: int
    accuracy: dict[str, float] = field(default_factory=dict)
    scored: dict[str, int] = field(default_factory=dict)
    regenerated: int = 0
    timings: dict = field(default_factory=dict)
    hardware: dict = field(default_factory=hardware_info)

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "episodes": self.episodes,
            "accuracy": self.accuracy,
            "scored": self.scored,
            "regenerated": self.regenerated,
            "timings": self.timings,
            "hardware": self.hardware,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def run_accuracy_experiment(
    n: int,
    k: int,
    episodes: int,
    beta_agent: float,
    beta: float,
    horizons=(5, 10, 15),
    seed: int = 0,
    epsilon: float = 0.3,
    n_sims: int = 300,
    region_size: int | None = None,
    max_steps: int | None = None,
    threshold: float = 0.01,
) -> EvalReport:
    """Generate episodes, replay them through the monitor, score predictions.

    A prediction at step t for horizon h is scored whenever t + h lands
    inside the trajectory: it is correct iff the ground-truth cell got
    probability >= threshold.
    """
    horizons = tuple(int(h) for h in horizons)
    max_steps = 4 * n if max_steps is None else max_steps
    correct = {h: 0 for h in horizons}
    totals = {h: 0 for h in horizons}
    regenerated = 0
    episode_timings: list[dict[str, float]] = []

    for episode in range(episodes):
        scenario = None
        for attempt in range(100):
            try:
                scenario = generate_scenario(
                    n, k, region_size=region_size, seed=derive_seed(seed, 0, episode, attempt)
                )
                break
            except GenerationError:
                regenerated += 1
        if scenario is None:
            raise GenerationError(f"episode {episode}: scenario generation kept failing")

        rng = np.random.default_rng(derive_seed(seed, 1, episode))
        trajectory = simulate_agent(scenario, beta_agent, max_steps, rng)

        config = InferenceConfig(
            propositions=scenario.grid.propositions,
            hypotheses=tuple(enumerate_hypotheses(scenario.grid.propositions)),
            beta=beta,
            epsilon=epsilon,
        )
        pred = PredictionConfig(
            horizons=horizons, n_sims=n_sims, seed=derive_seed(seed, 2, episode)
        )
        run = run_monitor(scenario.grid, config, trajectory, prediction=pred)
        episode_timings.append(run.timings)

        for step in run.steps:
            for dist in step.predictions:
                future = step.t + dist.horizon
                if future < len(trajectory.cells):
                    totals[dist.horizon] += 1
                    if prediction_correct(dist, trajectory.cells[future], threshold):
                        correct[dist.horizon] += 1

    # None (JSON null) for horizons that never fit inside a trajectory
    accuracy = {
        str(h): (correct[h] / totals[h] if totals[h] else None) for h in horizons
    }
    timings = {
        key: statistics.median(t[key] for t in episode_timings)
        for key in episode_timings[0]
    } if episode_timings else {}
    return EvalReport(
        params={
            "n": n,
            "k": k,
            "episodes": episodes,
            "beta_agent": beta_agent,
            "beta": beta,
            "epsilon": epsilon,
            "horizons": list(horizons),
            "n_sims": n_sims,
            "seed": seed,
            "max_steps": max_steps,
            "threshold": threshold,
        },
        episodes=episodes,
        accuracy=accuracy,
        scored={str(h): totals[h] for h in horizons},
        regenerated=regenerated,
        timings=timings,
    )


def _bench_scenario(n: int, k: int, seed: int) -> Scenario:
    for attempt in range(100):
        try:
            return generate_scenario(n, k, seed=derive_seed(seed, 3, n, attempt))
        except GenerationError:
            continue
    raise GenerationError(f"could not build a {n}x{n} benchmark scenario")


def run_benchmark(
    sizes=(20, 50, 100),
    k: int = 5,
    reps: int = 5,
    seed: int = 0,
    n_sims: int = 300,
    mc_horizons=(5, 10, 15),
) -> EvalReport:
    """Median wall-clock timings for the three pipeline phases per map size.

    Phases: shared product construction, full per-hypothesis cost table
    precomputation plus one posterior update, and one n_sims Monte-Carlo
    prediction per horizon.  One warm-up repetition is discarded; the rest
    are medians over ``reps`` runs on a monotonic clock.
    """
    timings: dict[str, dict] = {}
    for n in sizes:
        scenario = _bench_scenario(n, k, seed)
        grid = scenario.grid
        props = grid.propositions
        config = InferenceConfig(
            propositions=props, hypotheses=tuple(enumerate_hypotheses(props)), beta=1.0
        )

        build_times, infer_times = [], []
        mc_times: dict[int, list[float]] = {h: [] for h in mc_horizons}
        for rep in range(reps + 1):  # first rep is a discarded warm-up
            t0 = time.perf_counter()
            shared = build_product(grid, build_shared_automaton(props))
            shared.edges()
            t1 = time.perf_counter()
            tables = [hypothesis_cost_table(shared, h) for h in config.hypotheses]
            state = init_monitor(grid, config, tables, scenario.start)
            step_cell = next(
                c for c, _ in grid.neighbors(scenario.start) if c != scenario.start
            )
            state = update_posterior(state, step_cell, config, tables, grid)
            t2 = time.perf_counter()
            per_h = {}
            for h in mc_horizons:
                pred = PredictionConfig(
                    horizons=(h,), n_sims=n_sims, seed=derive_seed(seed, 4, n, rep)
                )
                t3 = time.perf_counter()
                predict_occupancy(state, pred, config, tables, grid)
                per_h[h] = time.perf_counter() - t3
            if rep == 0:
                continue
            build_times.append(t1 - t0)
            infer_times.append(t2 - t1)
            for h in mc_horizons:
                mc_times[h].append(per_h[h])

        timings[str(n)] = {
            "product_construction_s": statistics.median(build_times),
            "cost_precompute_plus_update_s": statistics.median(infer_times),
            "mc_simulations_s": {
                str(h): statistics.median(mc_times[h]) for h in mc_horizons
            },
        }

    return EvalReport(
        params={
            "sizes": list(sizes),
            "k": k,
            "reps": reps,
            "seed": seed,
            "n_sims": n_sims,
            "mc_horizons": list(mc_horizons),
        },
        episodes=reps,
        timings=timings,
    )
