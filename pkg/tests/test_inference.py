import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intentmon import (
    InferenceConfig,
    IntentFormula,
    Region,
    TrajectoryGapError,
    ValidationError,
    bayes_update,
    build_automaton,
    build_grid_map,
    build_product,
    cost_to_accept,
    enumerate_hypotheses,
    init_monitor,
    move_distribution,
    posterior_snapshot,
    transition_likelihood,
    update_posterior,
)
from intentmon.evaluation import build_cost_tables


def F(reach=(), avoid=()):
    return IntentFormula(reach=frozenset(reach), avoid=frozenset(avoid))


@pytest.fixture(scope="module")
def small_world():
    """5x5 map, three regions, 8 hypotheses, shared-route cost tables."""
    grid = build_grid_map(
        5, 5,
        regions=[Region("p0", (0, 0, 0, 0)), Region("p1", (4, 4, 4, 4)), Region("p2", (4, 0, 4, 0))],
        connectivity=8,
        stay_weight=None,
    )
    config = InferenceConfig(
        propositions=grid.propositions,
        hypotheses=tuple(enumerate_hypotheses(grid.propositions)),
        beta=1.0,
        epsilon=0.3,
    )
    _, tables = build_cost_tables(grid, config)
    return grid, config, tables


# -- config and init ------------------------------------------------------------------


def test_config_validation():
    h = (F(reach=("a",)),)
    with pytest.raises(ValidationError):
        InferenceConfig(propositions=("a",), hypotheses=h, beta=-1)
    with pytest.raises(ValidationError):
        InferenceConfig(propositions=("a",), hypotheses=h, epsilon=1.5)
    with pytest.raises(ValidationError):
        InferenceConfig(propositions=("a",), hypotheses=())
    with pytest.raises(ValidationError):
        InferenceConfig(propositions=("a",), hypotheses=(F(reach=("zz",)),))
    with pytest.raises(ValidationError):
        InferenceConfig(propositions=("a",), hypotheses=(F(reach=("a",)), F(reach=("a",))))


def test_init_uniform_prior(small_world):
    grid, config, tables = small_world
    state = init_monitor(grid, config, tables, (2, 2))
    assert state.t == 0
    assert np.all(state.posterior == 0.125)
    assert state.run_state == frozenset()


def test_init_inside_region_consumes_label(small_world):
    grid, config, tables = small_world
    state = init_monitor(grid, config, tables, (0, 0))
    assert state.run_state == frozenset({"p0"})


def test_init_missing_tables(small_world):
    grid, config, tables = small_world
    with pytest.raises(ValidationError, match="cost table"):
        init_monitor(grid, config, tables[:-1], (2, 2))


# -- likelihood ---------------------------------------------------------------------


def test_beta_zero_uniform(small_world):
    grid, config, tables = small_world
    n = len(grid.neighbors((2, 2)))
    for nxt, _ in grid.neighbors((2, 2)):
        for table in tables:
            assert transition_likelihood(grid, table, frozenset(), (2, 2), nxt, 0.0) == 1.0 / n


def test_two_neighbor_worked_example():
    # 2-cell corridor with stay: totals are 1 (move onto the goal) and 2
    # (stay: weight 1 + remaining cost 1), so at beta=1
    # p_move = e^-1 / (e^-1 + e^-2) = 1 / (1 + e^-1)
    grid = build_grid_map(2, 1, regions=[Region("g", (1, 0, 1, 0))], connectivity=4,
                          straight_weight=1.0, stay_weight=1.0)
    table = cost_to_accept(build_product(grid, build_automaton(F(reach=("g",)))))
    p_move = transition_likelihood(grid, table, frozenset(), (0, 0), (1, 0), 1.0)
    p_stay = transition_likelihood(grid, table, frozenset(), (0, 0), (0, 0), 1.0)
    assert p_move == pytest.approx(0.73106, abs=1e-4)
    assert p_stay == pytest.approx(0.26894, abs=1e-4)
    assert p_move == pytest.approx(1.0 / (1.0 + math.exp(-1.0)), abs=1e-12)


def test_move_into_reject_zero_likelihood(small_world):
    grid, config, tables = small_world
    avoider = next(i for i, h in enumerate(config.hypotheses) if "p0" in h.avoid and h.reach)
    p = transition_likelihood(grid, tables[avoider], frozenset(), (1, 1), (0, 0), 1.0)
    assert p == 0.0


def test_likelihood_normalizes(small_world):
    grid, config, tables = small_world
    for cell in [(2, 2), (0, 0), (4, 4), (1, 3)]:
        for table in tables:
            _, probs = move_distribution(grid, table, frozenset(), cell, config.beta)
            assert math.fsum(probs) == pytest.approx(1.0, abs=1e-9)


def test_all_infinite_neighbors_uniform_fallback(small_world):
    grid, config, tables = small_world
    # after visiting p0, hypotheses with p0 in avoid have inf everywhere
    avoider = next(i for i, h in enumerate(config.hypotheses) if "p0" in h.avoid)
    cells, probs = move_distribution(grid, tables[avoider], frozenset({"p0"}), (0, 0), 1.0)
    assert np.all(probs == 1.0 / len(cells))


def test_non_adjacent_move_rejected(small_world):
    grid, config, tables = small_world
    with pytest.raises(TrajectoryGapError, match="trajectory gap"):
        transition_likelihood(grid, tables[0], frozenset(), (0, 0), (3, 3), 1.0)


def test_high_beta_argmax_is_min_cost(small_world):
    grid, config, tables = small_world
    rng = np.random.default_rng(0)
    checked = 0
    while checked < 50:
        cell = (int(rng.integers(0, 5)), int(rng.integers(0, 5)))
        table = tables[int(rng.integers(0, len(tables)))]
        moves = grid.neighbors(cell)
        totals = [w + table.cost(c, grid.label_of(c)) for c, w in moves]
        finite = sorted(t for t in totals if math.isfinite(t))
        if len(finite) < 2 or finite[1] - finite[0] < 0.1:
            continue
        cells, probs = move_distribution(grid, table, frozenset(), cell, 50.0)
        assert totals[int(np.argmax(probs))] == finite[0]
        checked += 1


# -- posterior updates ------------------------------------------------------------------


def test_bayes_update_worked_example():
    post, anomaly = bayes_update(np.array([0.5, 0.5]), np.array([0.8, 0.2]), 0.3)
    assert anomaly is None
    assert abs(post[0] - 0.71) <= 1e-12
    assert abs(post[1] - 0.29) <= 1e-12


def test_bayes_update_zero_evidence_fallback():
    post, anomaly = bayes_update(np.array([0.5, 0.5]), np.array([0.0, 0.0]), 0.3)
    assert anomaly is not None
    assert np.allclose(post, 0.5)


def test_epsilon_zero_constant_likelihood_keeps_prior():
    prior = np.array([0.3, 0.2, 0.5])
    post, _ = bayes_update(prior, np.array([0.4, 0.4, 0.4]), 0.0)
    assert np.allclose(post, prior, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(
    prior=st.lists(st.floats(1e-6, 1.0), min_size=2, max_size=8),
    lik=st.lists(st.floats(0.0, 1.0), min_size=2, max_size=8),
    epsilon=st.floats(0.0, 1.0),
)
def test_bayes_update_properties(prior, lik, epsilon):
    n = min(len(prior), len(lik))
    prior = np.array(prior[:n]) / sum(prior[:n])
    post, _ = bayes_update(prior, np.array(lik[:n]), epsilon)
    assert math.fsum(post) == pytest.approx(1.0, abs=1e-9)
    assert post.min() >= epsilon / n - 1e-12


def test_step_into_avoided_region_hits_exact_floor(small_world):
    grid, config, tables = small_world
    state = init_monitor(grid, config, tables, (1, 1))
    state = update_posterior(state, (0, 0), config, tables, grid)  # enters p0
    floor = 0.3 / 8
    assert floor == 0.0375
    for h, p in zip(config.hypotheses, state.posterior):
        if "p0" in h.avoid:
            assert p == 0.0375
        else:
            assert p > 0.0375
    assert math.fsum(state.posterior) == pytest.approx(1.0, abs=1e-9)


def test_violation_permanence(small_world):
    grid, config, tables = small_world
    state = init_monitor(grid, config, tables, (1, 1))
    state = update_posterior(state, (0, 0), config, tables, grid)  # violate p0-avoiders
    violated = [i for i, h in enumerate(config.hypotheses) if "p0" in h.avoid]
    path = [(1, 1), (2, 2), (3, 3)]
    for cell in path:
        # once rejected, the move model is exactly uniform for the violated hypothesis
        n = len(grid.neighbors(state.cell))
        for i in violated:
            lk = transition_likelihood(grid, tables[i], state.run_state, state.cell, cell, config.beta)
            assert lk == 1.0 / n
        state = update_posterior(state, cell, config, tables, grid)
        for i in violated:
            assert state.posterior[i] >= 0.0375 - 1e-12
        assert math.fsum(state.posterior) == pytest.approx(1.0, abs=1e-9)


def test_update_determinism(small_world):
    grid, config, tables = small_world
    path = [(1, 1), (2, 1), (3, 1), (4, 0), (3, 1)]

    def replay():
        state = init_monitor(grid, config, tables, path[0])
        out = [state.posterior]
        for cell in path[1:]:
            state = update_posterior(state, cell, config, tables, grid)
            out.append(state.posterior)
        return np.vstack(out)

    assert np.array_equal(replay(), replay())


def test_update_rejects_gap(small_world):
    grid, config, tables = small_world
    state = init_monitor(grid, config, tables, (0, 0))
    with pytest.raises(TrajectoryGapError):
        update_posterior(state, (4, 4), config, tables, grid)


def test_snapshot(small_world):
    grid, config, tables = small_world
    state = init_monitor(grid, config, tables, (2, 2))
    snap = posterior_snapshot(state, config)
    assert len(snap) == 8
    assert [name for name, _ in snap] == [h.canonical for h in config.hypotheses]
    assert all(p == 0.125 for _, p in snap)
    assert math.fsum(p for _, p in snap) == pytest.approx(1.0, abs=1e-9)
