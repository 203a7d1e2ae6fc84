"""Input validation helpers shared by the estimator and the CLI."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .grid import Cell, GridMap


def check_grid(grid) -> GridMap:
    if not isinstance(grid, GridMap):
        raise ValidationError(f"expected a GridMap, got {type(grid).__name__}")
    return grid


def check_cell(grid: GridMap, cell, name: str = "cell") -> Cell:
    try:
        x, y = cell
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be an (x, y) pair, got {cell!r}") from None
    cell = (int(x), int(y))
    if not grid.in_bounds(cell):
        raise ValidationError(
            f"{name} {cell} out of bounds for a {grid.width}x{grid.height} map"
        )
    return cell


def check_trajectory_cells(grid: GridMap, cells) -> tuple[Cell, ...]:
    cells = tuple(check_cell(grid, c, name="trajectory cell") for c in cells)
    if not cells:
        raise ValidationError("trajectory must contain at least one cell")
    return cells


def check_propositions(grid: GridMap, propositions) -> tuple[str, ...]:
    props = tuple(propositions)
    unknown = set(props) - set(grid.propositions)
    if unknown:
        raise ValidationError(
            f"propositions {sorted(unknown)} are not regions of the map "
            f"(available: {list(grid.propositions)})"
        )
    if len(set(props)) != len(props):
        raise ValidationError(f"duplicate propositions: {list(props)}")
    return props


def check_probability_vector(p, atol: float = 1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if (p < 0).any() or abs(float(p.sum()) - 1.0) > atol:
        raise ValidationError("probabilities must be non-negative and sum to 1")
    return p
