"""Grid workspace modeled as a weighted transition system over labeled cells.

A :class:`GridMap` is a rectangular grid of cells with a symmetric move
relation (4- or 8-connected, optionally with a "stay" self-loop), positive
move weights, and disjoint rectangular regions that label cells with atomic
propositions.  Maps are immutable after construction and safe to share
between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import MapError, MapFormatError

Cell = tuple[int, int]

DEFAULT_STRAIGHT_WEIGHT = 1.0
DEFAULT_DIAGONAL_WEIGHT = 1.41421356
DEFAULT_STAY_WEIGHT = 1.0

_STRAIGHT_MOVES = ((0, -1), (-1, 0), (1, 0), (0, 1))
_DIAGONAL_MOVES = ((-1, -1), (1, -1), (-1, 1), (1, 1))

_MAP_KEYS = {
    "width",
    "height",
    "connectivity",
    "straight_weight",
    "diagonal_weight",
    "stay_weight",
    "regions",
}
_REGION_KEYS = {"name", "rect"}


@dataclass(frozen=True)
class Region:
    """Named axis-aligned rectangle of cells, inclusive on all four edges."""

    name: str
    rect: tuple[int, int, int, int]

    def __post_init__(self):
        if not self.name:
            raise MapError("region name must be a non-empty string")
        if len(self.rect) != 4:
            raise MapError(f"region {self.name!r} rect must be [x0, y0, x1, y1]")
        x0, y0, x1, y1 = self.rect
        if x0 > x1 or y0 > y1:
            raise MapError(f"region {self.name!r} has an empty rect {self.rect}")

    def contains(self, cell: Cell) -> bool:
        x0, y0, x1, y1 = self.rect
        return x0 <= cell[0] <= x1 and y0 <= cell[1] <= y1

    def overlaps(self, other: "Region") -> bool:
        ax0, ay0, ax1, ay1 = self.rect
        bx0, by0, bx1, by1 = other.rect
        return ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1

    def cells(self) -> Iterable[Cell]:
        x0, y0, x1, y1 = self.rect
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                yield (x, y)


class GridMap:
    """Weighted transition system over a labeled grid.

    Cells are (x, y) tuples with 0-based indices and origin in the top-left
    corner; iteration order is row-major wherever an order matters.  Each
    cell carries at most one region label (regions are pairwise disjoint).
    """

    def __init__(
        self,
        width: int,
        height: int,
        regions: Iterable[Region] = (),
        connectivity: int = 8,
        straight_weight: float = DEFAULT_STRAIGHT_WEIGHT,
        diagonal_weight: float = DEFAULT_DIAGONAL_WEIGHT,
        stay_weight: float | None = DEFAULT_STAY_WEIGHT,
    ):
        if width < 1 or height < 1:
            raise MapError(f"map dimensions must be >= 1, got {width}x{height}")
        if connectivity not in (4, 8):
            raise MapError(f"connectivity must be 4 or 8, got {connectivity!r}")
        for name, value in (("straight_weight", straight_weight), ("diagonal_weight", diagonal_weight)):
            if not (isinstance(value, (int, float)) and value > 0):
                raise MapError(f"{name} must be positive, got {value!r}")
        if stay_weight is not None and not (isinstance(stay_weight, (int, float)) and stay_weight > 0):
            raise MapError(f"stay_weight must be positive or null, got {stay_weight!r}")

        self.width = int(width)
        self.height = int(height)
        self.connectivity = connectivity
        self.straight_weight = float(straight_weight)
        self.diagonal_weight = float(diagonal_weight)
        self.stay_weight = None if stay_weight is None else float(stay_weight)
        self.regions = tuple(regions)
        self.n_cells = self.width * self.height

        self._validate_regions()
        self._label_index = self._build_labels()
        self._nb_ptr, self._nb_cell, self._nb_weight = self._build_adjacency()
        self._nb_cache: list[list[tuple[Cell, float]]] | None = None
        for arr in (self._label_index, self._nb_ptr, self._nb_cell, self._nb_weight):
            arr.setflags(write=False)

    # -- construction helpers -------------------------------------------------

    def _validate_regions(self):
        seen: dict[str, Region] = {}
        for region in self.regions:
            if region.name in seen:
                raise MapError(f"duplicate region name {region.name!r}")
            seen[region.name] = region
            x0, y0, x1, y1 = region.rect
            if x0 < 0 or y0 < 0 or x1 >= self.width or y1 >= self.height:
                raise MapError(
                    f"region {region.name!r} rect {region.rect} is out of bounds "
                    f"for a {self.width}x{self.height} map"
                )
        for i, a in enumerate(self.regions):
            for b in self.regions[i + 1 :]:
                if a.overlaps(b):
                    raise MapError(f"regions overlap: {a.name!r} and {b.name!r}")

    def _build_labels(self) -> np.ndarray:
        label = np.full(self.n_cells, -1, dtype=np.int32)
        for idx, region in enumerate(self.regions):
            x0, y0, x1, y1 = region.rect
            for y in range(y0, y1 + 1):
                label[y * self.width + x0 : y * self.width + x1 + 1] = idx
        return label

    def _build_adjacency(self):
        moves = _STRAIGHT_MOVES if self.connectivity == 4 else _STRAIGHT_MOVES + _DIAGONAL_MOVES
        ptr = np.zeros(self.n_cells + 1, dtype=np.int64)
        cells: list[int] = []
        weights: list[float] = []
        for y in range(self.height):
            for x in range(self.width):
                local: list[tuple[int, int, float]] = []
                for dx, dy in moves:
                    nx, ny = x + dx, y + dy
                    if 0 <= nx < self.width and 0 <= ny < self.height:
                        w = self.straight_weight if dx == 0 or dy == 0 else self.diagonal_weight
                        local.append((ny, nx, w))
                if self.stay_weight is not None:
                    local.append((y, x, self.stay_weight))
                local.sort()  # row-major by destination
                for ny, nx, w in local:
                    cells.append(ny * self.width + nx)
                    weights.append(w)
                ptr[y * self.width + x + 1] = len(cells)
        return ptr, np.array(cells, dtype=np.int32), np.array(weights, dtype=np.float64)

    # -- basic queries --------------------------------------------------------

    @property
    def propositions(self) -> tuple[str, ...]:
        return tuple(region.name for region in self.regions)

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def check_cell(self, cell: Cell) -> Cell:
        cell = (int(cell[0]), int(cell[1]))
        if not self.in_bounds(cell):
            raise MapError(f"cell {cell} out of bounds for a {self.width}x{self.height} map")
        return cell

    def cell_index(self, cell: Cell) -> int:
        return cell[1] * self.width + cell[0]

    def cell_at(self, index: int) -> Cell:
        return (index % self.width, index // self.width)

    def neighbors(self, cell: Cell) -> list[tuple[Cell, float]]:
        """Moves available from ``cell`` as (destination, weight) pairs.

        Includes the self-loop iff a stay weight is configured; ordering is
        row-major by destination.
        """
        idx = self.cell_index(self.check_cell(cell))
        if self._nb_cache is None:
            self._nb_cache = [
                [
                    (self.cell_at(int(c)), float(w))
                    for c, w in zip(
                        self._nb_cell[self._nb_ptr[i] : self._nb_ptr[i + 1]],
                        self._nb_weight[self._nb_ptr[i] : self._nb_ptr[i + 1]],
                    )
                ]
                for i in range(self.n_cells)
            ]
        return list(self._nb_cache[idx])

    def label_of(self, cell: Cell) -> frozenset[str]:
        """Set of propositions holding at ``cell`` (empty or a singleton)."""
        idx = self.cell_index(self.check_cell(cell))
        region = int(self._label_index[idx])
        if region < 0:
            return frozenset()
        return frozenset((self.regions[region].name,))

    @property
    def label_index(self) -> np.ndarray:
        """Per-cell region index (-1 for unlabeled), row-major."""
        return self._label_index

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All directed moves as flat (source, destination, weight) arrays."""
        counts = np.diff(self._nb_ptr)
        src = np.repeat(np.arange(self.n_cells, dtype=np.int32), counts)
        return src, self._nb_cell, self._nb_weight

    def unlabeled_cells(self) -> list[Cell]:
        return [self.cell_at(int(i)) for i in np.flatnonzero(self._label_index < 0)]

    # -- equality / repr ------------------------------------------------------

    def _key(self):
        return (
            self.width,
            self.height,
            self.connectivity,
            self.straight_weight,
            self.diagonal_weight,
            self.stay_weight,
            self.regions,
        )

    def __eq__(self, other):
        return isinstance(other, GridMap) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"GridMap({self.width}x{self.height}, connectivity={self.connectivity}, "
            f"regions={[r.name for r in self.regions]})"
        )


def build_grid_map(
    width: int,
    height: int,
    regions: Iterable[Region] = (),
    connectivity: int = 8,
    straight_weight: float = DEFAULT_STRAIGHT_WEIGHT,
    diagonal_weight: float = DEFAULT_DIAGONAL_WEIGHT,
    stay_weight: float | None = DEFAULT_STAY_WEIGHT,
) -> GridMap:
    """Build and validate a :class:`GridMap`."""
    return GridMap(
        width,
        height,
        regions=regions,
        connectivity=connectivity,
        straight_weight=straight_weight,
        diagonal_weight=diagonal_weight,
        stay_weight=stay_weight,
    )


def _require_int(doc: dict, key: str, default=None):
    if key not in doc:
        if default is None:
            raise MapFormatError(f"missing required map key {key!r}")
        return default
    value = doc[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise MapFormatError(f"map key {key!r} must be an integer, got {value!r}")
    return value


def _require_number(doc: dict, key: str, default, nullable=False):
    if key not in doc:
        return default
    value = doc[key]
    if value is None and nullable:
        return None
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise MapFormatError(f"map key {key!r} must be a number, got {value!r}")
    return value


def parse_map_file(text: str) -> GridMap:
    """Parse a JSON map document (see the README for the schema)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapFormatError(
            f"invalid map JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})"
        ) from exc
    if not isinstance(doc, dict):
        raise MapFormatError("map document must be a JSON object")
    unknown = set(doc) - _MAP_KEYS
    if unknown:
        raise MapFormatError(f"unknown map keys: {sorted(unknown)}")

    width = _require_int(doc, "width")
    height = _require_int(doc, "height")
    connectivity = _require_int(doc, "connectivity", default=8)
    straight = _require_number(doc, "straight_weight", DEFAULT_STRAIGHT_WEIGHT)
    diagonal = _require_number(doc, "diagonal_weight", DEFAULT_DIAGONAL_WEIGHT)
    stay = _require_number(doc, "stay_weight", DEFAULT_STAY_WEIGHT, nullable=True)

    raw_regions = doc.get("regions", [])
    if not isinstance(raw_regions, list):
        raise MapFormatError("map key 'regions' must be an array")
    regions = []
    names = set()
    for entry in raw_regions:
        if not isinstance(entry, dict):
            raise MapFormatError(f"region entries must be objects, got {entry!r}")
        unknown = set(entry) - _REGION_KEYS
        if unknown:
            raise MapFormatError(f"unknown region keys: {sorted(unknown)}")
        if "name" not in entry or "rect" not in entry:
            raise MapFormatError(f"region entry needs 'name' and 'rect': {entry!r}")
        name, rect = entry["name"], entry["rect"]
        if not isinstance(name, str):
            raise MapFormatError(f"region name must be a string, got {name!r}")
        if name in names:
            raise MapError(f"duplicate region name {name!r}")
        names.add(name)
        if (
            not isinstance(rect, list)
            or len(rect) != 4
            or any(not isinstance(v, int) or isinstance(v, bool) for v in rect)
        ):
            raise MapFormatError(f"region {name!r} rect must be a list of 4 integers")
        regions.append(Region(name, tuple(rect)))

    return build_grid_map(
        width,
        height,
        regions=regions,
        connectivity=connectivity,
        straight_weight=straight,
        diagonal_weight=diagonal,
        stay_weight=stay,
    )


def serialize_map(grid: GridMap) -> str:
    """Serialize a map to the JSON document format (round-trips exactly)."""
    doc = {
        "width": grid.width,
        "height": grid.height,
        "connectivity": grid.connectivity,
        "straight_weight": grid.straight_weight,
        "diagonal_weight": grid.diagonal_weight,
        "stay_weight": grid.stay_weight,
        "regions": [{"name": r.name, "rect": list(r.rect)} for r in grid.regions],
    }
    return json.dumps(doc, indent=2) + "\n"
