"""Command-line interface.

Subcommands cover the whole pipeline: generate a map, simulate an agent,
monitor a trajectory (posterior stream + predictions), run the accuracy
experiment, benchmark timings, and discretize metric trajectories.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime anomaly.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import GenerationError, ValidationError
from .evaluation import run_accuracy_experiment, run_benchmark, run_monitor
from .formulas import enumerate_hypotheses, parse_formula
from .grid import GridMap, parse_map_file, serialize_map
from .inference import InferenceConfig
from .prediction import MODE_EXACT, PredictionConfig
from .scenarios import (
    Scenario,
    default_region_size,
    discretize_trajectory,
    place_regions,
    read_points_csv,
    read_trajectory_csv,
    simulate_agent,
    write_trajectory_csv,
)
from .validation import check_cell, check_propositions

log = logging.getLogger("intentmon")

USAGE_ERROR = 1
VALIDATION_ERROR = 2
RUNTIME_ANOMALY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _cell(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    try:
        return (int(parts[0]), int(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integer x,y, got {text!r}")


def _room(text: str):
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numeric WIDTHxHEIGHT, got {text!r}")


def _load_map(path: str) -> GridMap:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read map file {path!r}: {exc}") from exc
    return parse_map_file(text)


def build_parser() -> _Parser:
    parser = _Parser(prog="intentmon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-map", parents=[], help="generate a random labeled map")
    p.add_argument("--n", type=int, required=True, help="grid size (n x n)")
    p.add_argument("--k", type=int, required=True, help="number of regions")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output map JSON path")
    p.add_argument("--region-size", type=int, default=None)

    p = sub.add_parser("simulate", help="roll a noisy-rational agent")
    p.add_argument("--map", required=True)
    p.add_argument("--intent", required=True, help='formula, e.g. "F p1 & G !p0"')
    p.add_argument("--start", type=_cell, required=True, metavar="X,Y")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--max-steps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output trajectory CSV path")

    p = sub.add_parser("monitor", help="replay a trajectory through the monitor")
    p.add_argument("--map", required=True)
    p.add_argument("--props", required=True, help="comma-separated propositions")
    p.add_argument("--traj", required=True, help="trajectory CSV path")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--horizons", type=_int_list, default=[5, 10, 15])
    p.add_argument("--sims", type=int, default=300)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None, help="JSON-lines output (default stdout)")
    p.add_argument("--heatmap-dir", default=None)

    p = sub.add_parser("eval", help="synthetic prediction-accuracy experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--beta-agent", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--horizons", type=_int_list, default=[5, 10, 15])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sims", type=int, default=300)
    p.add_argument("--epsilon", type=float, default=0.3)

    p = sub.add_parser("bench", help="wall-clock benchmark of the pipeline phases")
    p.add_argument("--sizes", type=_int_list, default=[20, 50, 100])
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("discretize", help="grid-discretize a metric trajectory")
    p.add_argument("--in", dest="infile", required=True, help="points CSV (t,x,y)")
    p.add_argument("--room", type=_room, required=True, metavar="WxH")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)

    return parser


# -- subcommand bodies -----------------------------------------------------------


def _cmd_gen_map(args) -> int:
    rng = np.random.default_rng(args.seed)
    size = args.region_size if args.region_size is not None else default_region_size(args.n)
    regions = place_regions(args.n, args.k, size, rng)
    grid = GridMap(args.n, args.n, regions=regions, connectivity=8)
    Path(args.out).write_text(serialize_map(grid), encoding="utf-8")
    log.info("wrote %s (%d regions)", args.out, args.k)
    return 0


def _cmd_simulate(args) -> int:
    grid = _load_map(args.map)
    intent = parse_formula(args.intent)
    check_propositions(grid, sorted(intent.propositions))
    start = check_cell(grid, args.start, name="start")
    scenario = Scenario(grid=grid, true_intent=intent, start=start, seed=args.seed)
    trajectory = simulate_agent(
        scenario, args.beta, args.max_steps, np.random.default_rng(args.seed)
    )
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        write_trajectory_csv(trajectory, f)
    log.info("wrote %s (%d cells)", args.out, len(trajectory))
    return 0


def _write_heatmaps(directory: Path, grid: GridMap, step) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for dist in step.predictions:
        for cell, p in dist.prob.items():
            rows.append((dist.horizon, cell[0], cell[1], p))
    with open(directory / f"step_{step.t:04d}.csv", "w", encoding="utf-8") as f:
        f.write("h,x,y,prob\n")
        for h, x, y, p in rows:
            f.write(f"{h},{x},{y},{p!r}\n")
    for dist in step.predictions:
        peak = max(dist.prob.values(), default=0.0)
        lines = ["P2", f"{grid.width} {grid.height}", "255"]
        for y in range(grid.height):
            line = []
            for x in range(grid.width):
                p = dist.prob.get((x, y), 0.0)
                line.append(str(round(255 * p / peak) if peak > 0 else 0))
            lines.append(" ".join(line))
        path = directory / f"step_{step.t:04d}_h{dist.horizon}.pgm"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cmd_monitor(args) -> int:
    grid = _load_map(args.map)
    props = check_propositions(grid, [p for p in args.props.split(",") if p])
    with open(args.traj, encoding="utf-8") as f:
        trajectory = read_trajectory_csv(f)
    config = InferenceConfig(
        propositions=props,
        hypotheses=tuple(enumerate_hypotheses(props)),
        beta=args.beta,
        epsilon=args.epsilon,
    )
    prediction = PredictionConfig(
        horizons=tuple(args.horizons), n_sims=args.sims, seed=args.seed, mode=MODE_EXACT
    )
    heatmap_dir = Path(args.heatmap_dir) if args.heatmap_dir else None
    on_step = (
        (lambda step: _write_heatmaps(heatmap_dir, grid, step)) if heatmap_dir else None
    )
    run = run_monitor(grid, config, trajectory, prediction=prediction, on_step=on_step)
    lines = [json.dumps(record, separators=(",", ":")) for record in run.records()]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    log.info("timings: %s", run.timings)
    return 0


def _cmd_eval(args) -> int:
    report = run_accuracy_experiment(
        n=args.n,
        k=args.k,
        episodes=args.episodes,
        beta_agent=args.beta_agent,
        beta=args.beta,
        horizons=tuple(args.horizons),
        seed=args.seed,
        epsilon=args.epsilon,
        n_sims=args.sims,
    )
    Path(args.out).write_text(report.to_json(), encoding="utf-8")
    log.info("accuracy: %s", report.accuracy)
    return 0


def _cmd_bench(args) -> int:
    report = run_benchmark(sizes=tuple(args.sizes), k=args.k, reps=args.reps, seed=args.seed)
    Path(args.out).write_text(report.to_json(), encoding="utf-8")
    log.info("timings: %s", report.timings)
    return 0


def _cmd_discretize(args) -> int:
    with open(args.infile, encoding="utf-8") as f:
        points = read_points_csv(f)
    trajectory = discretize_trajectory(points, args.room, args.n)
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        write_trajectory_csv(trajectory, f)
    log.info("wrote %s (%d cells)", args.out, len(trajectory))
    return 0


_COMMANDS = {
    "gen-map": _cmd_gen_map,
    "simulate": _cmd_simulate,
    "monitor": _cmd_monitor,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
    "discretize": _cmd_discretize,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"intentmon: validation error: {exc}", file=sys.stderr)
        return VALIDATION_ERROR
    except (GenerationError, RuntimeError, OSError) as exc:
        print(f"intentmon: runtime anomaly: {exc}", file=sys.stderr)
        return RUNTIME_ANOMALY


if __name__ == "__main__":
    sys.exit(main())
