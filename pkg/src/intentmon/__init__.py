"""Temporal-logic intent inference and position forecasting on grid maps.

Given a labeled grid workspace and a family of avoid/reach intent formulas,
this package infers which intent a moving agent is pursuing from its observed
cells (Bayesian updates under a Boltzmann noisy-rationality move model) and
forecasts the distribution of its future positions by posterior-predictive
Monte-Carlo rollouts.
"""

from .automata import SafetyGuaranteeAutomaton, build_automaton, build_shared_automaton
from .errors import (
    FormulaError,
    GenerationError,
    IllegalTransitionError,
    MapError,
    MapFormatError,
    PatternError,
    TrajectoryGapError,
    ValidationError,
)
from .estimator import IntentMonitor
from .evaluation import (
    EvalReport,
    MonitorRun,
    MonitorStep,
    build_cost_tables,
    run_accuracy_experiment,
    run_benchmark,
    run_monitor,
)
from .formulas import (
    IntentFormula,
    PrefixVerdict,
    enumerate_hypotheses,
    evaluate_prefix,
    expand_pattern,
    hypotheses_from_json,
    hypotheses_to_json,
    parse_formula,
)
from .grid import (
    Cell,
    GridMap,
    Region,
    build_grid_map,
    parse_map_file,
    serialize_map,
)
from .inference import (
    InferenceConfig,
    MonitorState,
    bayes_update,
    init_monitor,
    move_distribution,
    posterior_snapshot,
    transition_likelihood,
    update_posterior,
)
from .prediction import (
    OccupancyDistribution,
    PredictionConfig,
    predict_occupancy,
    prediction_correct,
    sample_trajectory,
)
from .product import (
    CostTable,
    ProductAutomaton,
    advance_product_state,
    build_product,
    cost_to_accept,
    hypothesis_cost_table,
)
from .scenarios import (
    Scenario,
    Trajectory,
    discretize_trajectory,
    generate_scenario,
    simulate_agent,
)

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "CostTable",
    "EvalReport",
    "FormulaError",
    "GenerationError",
    "GridMap",
    "IllegalTransitionError",
    "InferenceConfig",
    "IntentFormula",
    "IntentMonitor",
    "MapError",
    "MapFormatError",
    "MonitorRun",
    "MonitorState",
    "MonitorStep",
    "OccupancyDistribution",
    "PatternError",
    "PredictionConfig",
    "PrefixVerdict",
    "ProductAutomaton",
    "Region",
    "SafetyGuaranteeAutomaton",
    "Scenario",
    "Trajectory",
    "TrajectoryGapError",
    "ValidationError",
    "advance_product_state",
    "bayes_update",
    "build_automaton",
    "build_cost_tables",
    "build_grid_map",
    "build_product",
    "build_shared_automaton",
    "cost_to_accept",
    "discretize_trajectory",
    "enumerate_hypotheses",
    "evaluate_prefix",
    "expand_pattern",
    "generate_scenario",
    "hypotheses_from_json",
    "hypotheses_to_json",
    "hypothesis_cost_table",
    "init_monitor",
    "move_distribution",
    "parse_formula",
    "parse_map_file",
    "posterior_snapshot",
    "predict_occupancy",
    "prediction_correct",
    "run_accuracy_experiment",
    "run_benchmark",
    "run_monitor",
    "sample_trajectory",
    "serialize_map",
    "simulate_agent",
    "transition_likelihood",
    "update_posterior",
]
