"""Synthetic scenarios, the noisy-rational ground-truth agent, and trajectory
ingestion.

The simulated agent replaces an external motion planner: it draws every move
from the same Boltzmann model the monitor assumes, under its (hidden) true
intent.  At a high rationality setting its paths are near-optimal, at low
settings it wanders.  Self-loops are disabled for the agent, so synthetic
trajectories never repeat a cell back-to-back.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .automata import build_automaton
from .errors import GenerationError, ValidationError
from .formulas import IntentFormula
from .grid import Cell, GridMap, Region
from .inference import move_distribution
from .product import build_product, cost_to_accept

log = logging.getLogger(__name__)

SOURCE_SYNTHETIC = "synthetic"
SOURCE_INGESTED = "ingested"

_PLACEMENT_ATTEMPTS = 1000
_START_ATTEMPTS = 100


@dataclass(frozen=True)
class Scenario:
    grid: GridMap
    true_intent: IntentFormula
    start: Cell
    seed: int


@dataclass(frozen=True)
class Trajectory:
    cells: tuple[Cell, ...]
    source: str = SOURCE_SYNTHETIC

    def __post_init__(self):
        object.__setattr__(
            self, "cells", tuple((int(x), int(y)) for x, y in self.cells)
        )

    def __len__(self):
        return len(self.cells)


def default_region_size(n: int) -> int:
    """Region edge length scaled with the map (2x2 on a 20x20 map)."""
    return max(1, round(n / 10))


def place_regions(
    n: int, k: int, region_size: int, rng: np.random.Generator
) -> list[Region]:
    """Place k disjoint square regions uniformly at random on an n x n map."""
    if region_size > n:
        raise GenerationError(f"region size {region_size} does not fit an {n}x{n} map")
    placed: list[Region] = []
    attempts = 0
    while len(placed) < k:
        if attempts >= _PLACEMENT_ATTEMPTS:
            raise GenerationError(
                f"could not place {k} disjoint {region_size}x{region_size} regions "
                f"on an {n}x{n} map after {attempts} attempts"
            )
        attempts += 1
        x0 = int(rng.integers(0, n - region_size + 1))
        y0 = int(rng.integers(0, n - region_size + 1))
        candidate = Region(
            f"p{len(placed)}", (x0, y0, x0 + region_size - 1, y0 + region_size - 1)
        )
        if all(not candidate.overlaps(existing) for existing in placed):
            placed.append(candidate)
    return placed


def generate_scenario(
    n: int, k: int, region_size: int | None = None, seed: int = 0
) -> Scenario:
    """Random map with k regions, a hidden avoid/reach split, and a start cell.

    A non-empty proper subset of the regions becomes obstacles (avoid), the
    rest become targets (reach); the start cell is drawn uniformly from the
    unlabeled cells and re-drawn until the intent is satisfiable from it.
    """
    if k < 2:
        raise GenerationError(
            "scenario generation needs k >= 2 regions to split into obstacles and targets"
        )
    rng = np.random.default_rng(seed)
    size = default_region_size(n) if region_size is None else region_size
    regions = place_regions(n, k, size, rng)
    grid = GridMap(n, n, regions=regions, connectivity=8, stay_weight=None)

    avoid_mask = int(rng.integers(1, (1 << k) - 1))  # non-empty proper subset
    avoid = frozenset(r.name for i, r in enumerate(regions) if avoid_mask >> i & 1)
    reach = frozenset(r.name for r in regions) - avoid
    intent = IntentFormula(reach=reach, avoid=avoid)

    table = cost_to_accept(build_product(grid, build_automaton(intent)))
    candidates = grid.unlabeled_cells()
    if not candidates:
        raise GenerationError("no unlabeled cells left to start from")
    for _ in range(_START_ATTEMPTS):
        start = candidates[int(rng.integers(0, len(candidates)))]
        if math.isfinite(table.cost(start, frozenset())):
            return Scenario(grid=grid, true_intent=intent, start=start, seed=seed)
    raise GenerationError(
        f"intent {intent.canonical!r} unsatisfiable from every sampled start cell"
    )


def simulate_agent(
    scenario: Scenario,
    beta_agent: float,
    max_steps: int,
    rng: np.random.Generator,
) -> Trajectory:
    """Roll the noisy-rational agent under its true intent.

    Stops on reaching an accepting product state or after max_steps moves.
    """
    grid = scenario.grid
    automaton = build_automaton(scenario.true_intent)
    table = cost_to_accept(build_product(grid, automaton))
    cell = grid.check_cell(scenario.start)
    visited = frozenset(grid.label_of(cell))
    cells = [cell]
    for _ in range(max_steps):
        if automaton.is_accepting(automaton.state_for_visited(visited)):
            break
        moves, probs = move_distribution(
            grid, table, visited, cell, beta_agent, include_stay=False
        )
        if not moves:
            break
        cell = moves[_sample_index(probs, rng)]
        visited = visited | grid.label_of(cell)
        cells.append(cell)
    return Trajectory(cells=tuple(cells), source=SOURCE_SYNTHETIC)


def _sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    index = int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
    return min(index, len(probs) - 1)


def discretize_trajectory(
    points: Sequence[tuple[float, float]],
    room: tuple[float, float],
    n: int,
) -> Trajectory:
    """Map metric positions in a room onto an n x n grid trajectory.

    Each point lands in cell ``(floor(x / width * n), floor(y / height * n))``
    clamped to the grid; consecutive duplicates collapse and any jump wider
    than one cell is bridged by a straight-line cell chain so consecutive
    cells are always adjacent (8-connected).
    """
    if not points:
        raise ValidationError("empty trajectory: no points to discretize")
    width, height = room
    if width <= 0 or height <= 0:
        raise ValidationError(f"room dimensions must be positive, got {room}")

    cells: list[Cell] = []
    clamped = 0
    for px, py in points:
        if not (0 <= px <= width and 0 <= py <= height):
            clamped += 1
        cx = min(n - 1, max(0, math.floor(px / width * n)))
        cy = min(n - 1, max(0, math.floor(py / height * n)))
        cell = (cx, cy)
        if cells and cells[-1] == cell:
            continue
        if cells:
            cells.extend(_bridge(cells[-1], cell))
        cells.append(cell)
    if clamped:
        log.warning("%d points outside the %sx%s room were clamped", clamped, width, height)
    return Trajectory(cells=tuple(cells), source=SOURCE_INGESTED)


def _bridge(a: Cell, b: Cell) -> list[Cell]:
    """Intermediate cells stepping one king-move at a time from a toward b."""
    out = []
    x, y = a
    while max(abs(b[0] - x), abs(b[1] - y)) > 1:
        x += (b[0] > x) - (b[0] < x)
        y += (b[1] > y) - (b[1] < y)
        out.append((x, y))
    return out


# -- CSV interchange -----------------------------------------------------------


def write_trajectory_csv(trajectory: Trajectory, fileobj: io.TextIOBase) -> None:
    writer = csv.writer(fileobj)
    writer.writerow(["step", "x", "y"])
    for step, (x, y) in enumerate(trajectory.cells):
        writer.writerow([step, x, y])


def read_trajectory_csv(fileobj: io.TextIOBase) -> Trajectory:
    reader = csv.reader(fileobj)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["step", "x", "y"]:
        raise ValidationError(f"trajectory CSV must start with 'step,x,y', got {header}")
    cells = []
    for row in reader:
        if not row:
            continue
        try:
            cells.append((int(row[1]), int(row[2])))
        except (IndexError, ValueError):
            raise ValidationError(f"bad trajectory CSV row: {row}") from None
    if not cells:
        raise ValidationError("trajectory CSV contains no cells")
    return Trajectory(cells=tuple(cells), source=SOURCE_INGESTED)


def read_points_csv(fileobj: io.TextIOBase) -> list[tuple[float, float]]:
    """Read metric positions from a CSV with required header ``t,x,y``."""
    reader = csv.reader(fileobj)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["t", "x", "y"]:
        raise ValidationError(f"points CSV must start with 't,x,y', got {header}")
    points = []
    for row in reader:
        if not row:
            continue
        try:
            points.append((float(row[1]), float(row[2])))
        except (IndexError, ValueError):
            raise ValidationError(f"bad points CSV row: {row}") from None
    return points
