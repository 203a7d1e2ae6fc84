"""Product of a grid map with an acceptance automaton, and cost-to-acceptance.

The product synchronizes grid moves with automaton progress: a move into a
cell feeds that cell's label to the automaton (labels are consumed on entry,
so stepping into a region counts as visiting it; the monitor consumes the
label of the start cell at initialization).  Cost-to-acceptance is the
single-destination shortest path distance from every product state to the
accepting set, computed by one Dijkstra sweep on the reversed product graph
seeded from all accepting states at distance zero (equivalent to a virtual
sink joined to the accepting set by zero-cost links).

Unreachable states carry ``inf`` — a real IEEE infinity, never a sentinel,
so that downstream Boltzmann weights vanish exactly.
"""

from __future__ import annotations

import csv

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .automata import KIND_SHARED, SafetyGuaranteeAutomaton
from .errors import IllegalTransitionError, ValidationError
from .formulas import IntentFormula
from .grid import Cell, GridMap


class ProductAutomaton:
    """Synchronized composition of a :class:`GridMap` and an automaton.

    Product states are (cell, automaton state) pairs indexed as
    ``state * n_cells + cell_index``; all pairs are materialized.
    """

    def __init__(self, grid: GridMap, automaton: SafetyGuaranteeAutomaton):
        unbound = (set(automaton.propositions) | set(automaton.avoid)) - set(grid.propositions)
        if unbound:
            raise ValidationError(
                f"unbound propositions (not regions of the map): {sorted(unbound)}"
            )
        self.grid = grid
        self.automaton = automaton
        self.n_cells = grid.n_cells
        self.n_states = automaton.n_states * grid.n_cells
        self.dest_state = automaton.dest_matrix(grid)
        self._edges: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    def state_index(self, cell: Cell, q: int) -> int:
        return q * self.n_cells + self.grid.cell_index(cell)

    def state_at(self, index: int) -> tuple[Cell, int]:
        return self.grid.cell_at(index % self.n_cells), index // self.n_cells

    def accepting_indices(self) -> np.ndarray:
        """Product indices of (every cell) x (accepting automaton states)."""
        cells = np.arange(self.n_cells, dtype=np.int64)
        rows = [q * self.n_cells + cells for q in sorted(self.automaton.accepting)]
        if not rows:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(rows)

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All product transitions as flat (source, destination, weight) arrays."""
        if self._edges is None:
            src_c, dst_c, w = self.grid.edges()
            n_q = self.automaton.n_states
            psrc = np.empty(len(src_c) * n_q, dtype=np.int64)
            pdst = np.empty_like(psrc)
            for q in range(n_q):
                lo = q * len(src_c)
                hi = lo + len(src_c)
                psrc[lo:hi] = q * self.n_cells + src_c
                pdst[lo:hi] = self.dest_state[q, dst_c].astype(np.int64) * self.n_cells + dst_c
            self._edges = (psrc, pdst, np.tile(w, n_q))
        return self._edges

    def advance(self, state: tuple[Cell, int], next_cell: Cell) -> tuple[Cell, int]:
        """One synchronized move; raises on non-adjacent cells."""
        cell, q = state
        next_cell = self.grid.check_cell(next_cell)
        if all(c != next_cell for c, _ in self.grid.neighbors(cell)):
            raise IllegalTransitionError(
                f"illegal transition: {tuple(cell)} -> {next_cell} is not a grid move"
            )
        return next_cell, int(self.dest_state[q, self.grid.cell_index(next_cell)])

    def __repr__(self):
        return f"ProductAutomaton({self.grid!r} x {self.automaton!r})"


class CostTable:
    """Optimal remaining cost-to-acceptance per (cell, automaton state).

    ``values[q, cell_index]`` is the minimum total move weight to reach an
    accepting product state, 0 exactly on accepting states, ``inf`` where
    acceptance is unreachable.
    """

    def __init__(
        self,
        grid: GridMap,
        automaton: SafetyGuaranteeAutomaton,
        hypothesis: IntentFormula | None,
        values: np.ndarray,
    ):
        self.grid = grid
        self.automaton = automaton
        self.hypothesis = hypothesis
        self.values = values
        self.values.setflags(write=False)

    def cost_state(self, cell: Cell, q: int) -> float:
        return float(self.values[q, self.grid.cell_index(cell)])

    def cost(self, cell: Cell, visited) -> float:
        """Cost at ``cell`` given the set of propositions visited so far."""
        q = self.automaton.state_for_visited(visited)
        return float(self.values[q, self.grid.cell_index(cell)])

    def dump_csv(self, fileobj) -> None:
        """Debug dump: rows ``x,y,automaton_state,cost`` with ``inf`` literal."""
        writer = csv.writer(fileobj)
        writer.writerow(["x", "y", "automaton_state", "cost"])
        for q in range(self.values.shape[0]):
            label = self.automaton.state_label(q)
            for idx in range(self.grid.n_cells):
                x, y = self.grid.cell_at(idx)
                value = self.values[q, idx]
                writer.writerow([x, y, label, "inf" if np.isinf(value) else repr(float(value))])


def build_product(grid: GridMap, automaton: SafetyGuaranteeAutomaton) -> ProductAutomaton:
    """Build the synchronized product of a map and an automaton."""
    return ProductAutomaton(grid, automaton)


def cost_to_accept(product: ProductAutomaton) -> CostTable:
    """Exact cost-to-acceptance for every product state.

    One multi-source Dijkstra on the reversed product graph, all accepting
    states seeded at distance zero.
    """
    accepting = product.accepting_indices()
    if accepting.size == 0:
        raise ValidationError("no accepting states")
    psrc, pdst, w = product.edges()
    reversed_graph = csr_matrix(
        (w, (pdst, psrc)), shape=(product.n_states, product.n_states)
    )
    dist = dijkstra(reversed_graph, directed=True, indices=accepting, min_only=True)
    values = dist.reshape(product.automaton.n_states, product.n_cells)
    return CostTable(product.grid, product.automaton, product.automaton.formula, values)


def hypothesis_cost_table(
    shared_product: ProductAutomaton, hypothesis: IntentFormula
) -> CostTable:
    """Cost table for one hypothesis read off the shared product.

    The hypothesis's accepting set is "subset == reach"; any subset touching
    the avoid set can never grow into the reach set (subsets only grow), so
    those rows are ``inf`` outright and the Dijkstra sweep runs on the
    sub-graph of subsets contained in the reach set.  The result matches the
    dedicated per-hypothesis product exactly.
    """
    automaton = shared_product.automaton
    if automaton.kind != KIND_SHARED:
        raise ValidationError("hypothesis_cost_table needs a shared-automaton product")
    props = set(automaton.propositions)
    if hypothesis.reach | hypothesis.avoid != props:
        raise ValidationError(
            f"hypothesis {hypothesis.canonical!r} does not partition the shared "
            f"propositions {sorted(props)}"
        )
    grid = shared_product.grid
    n = grid.n_cells
    k = len(automaton.propositions)
    reach_mask = automaton.state_for_visited(hypothesis.reach)

    sub_states = [s for s in range(1 << k) if s & ~reach_mask == 0]
    local = np.full(1 << k, -1, dtype=np.int64)
    local[sub_states] = np.arange(len(sub_states))

    src_c, dst_c, w = grid.edges()
    bits_dst = automaton.cell_bits(grid)[dst_c].astype(np.int64)
    avoid_mask = ((1 << k) - 1) & ~reach_mask
    keep = (bits_dst & avoid_mask) == 0
    es, ed, ew, ebits = src_c[keep], dst_c[keep], w[keep], bits_dst[keep]

    n_sub = len(sub_states)
    m = len(es)
    psrc = np.empty(m * n_sub, dtype=np.int64)
    pdst = np.empty_like(psrc)
    for i, s in enumerate(sub_states):
        lo, hi = i * m, (i + 1) * m
        psrc[lo:hi] = i * n + es
        pdst[lo:hi] = local[s | ebits] * n + ed
    reversed_graph = csr_matrix(
        (np.tile(ew, n_sub), (pdst, psrc)), shape=(n_sub * n, n_sub * n)
    )
    accepting = local[reach_mask] * n + np.arange(n, dtype=np.int64)
    dist = dijkstra(reversed_graph, directed=True, indices=accepting, min_only=True)

    values = np.full((1 << k, n), np.inf)
    values[sub_states, :] = dist.reshape(n_sub, n)
    return CostTable(grid, automaton, hypothesis, values)


def advance_product_state(
    product: ProductAutomaton, state: tuple[Cell, int], next_cell: Cell
) -> tuple[Cell, int]:
    """Advance a (cell, automaton state) pair by one observed move."""
    return product.advance(state, next_cell)
