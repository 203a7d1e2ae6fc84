"""Subset-tracking acceptance automata for avoid/reach formulas.

The fragment admits a direct deterministic construction: a state is the set
of reach propositions visited so far, entering an avoided region falls into
an absorbing reject state, and the single accepting state is "all reach
propositions visited".  States partition into transient states, accepting
states (closed except for the drop to reject), and the reject sink.

Two kinds are built.  The per-hypothesis kind carries its own avoid set and
reject state.  The shared kind tracks subsets of all K propositions with no
reject state; any avoid/reach partition of those propositions can then be
checked on the same automaton by picking a different accepting subset.
"""

from __future__ import annotations

import numpy as np

from .errors import FormulaError
from .formulas import IntentFormula, PrefixVerdict
from .grid import GridMap

KIND_HYPOTHESIS = "hypothesis"
KIND_SHARED = "shared"


class SafetyGuaranteeAutomaton:
    """Deterministic automaton over label sets; states are visited subsets.

    ``propositions`` fixes the subset bit order (bit i is propositions[i]);
    subset states are numbered by bitmask, the optional reject state comes
    last.  ``avoid`` is empty for the shared kind.
    """

    def __init__(
        self,
        kind: str,
        propositions: tuple[str, ...],
        avoid: frozenset[str],
        accepting: frozenset[int],
        formula: IntentFormula | None = None,
    ):
        self.kind = kind
        self.propositions = propositions
        self.avoid = avoid
        self.formula = formula
        self.n_subsets = 1 << len(propositions)
        self.reject: int | None = self.n_subsets if kind == KIND_HYPOTHESIS else None
        self.n_states = self.n_subsets + (1 if self.reject is not None else 0)
        self.initial = 0
        self.accepting = accepting
        self._bit = {name: 1 << i for i, name in enumerate(propositions)}

    # -- transition function ---------------------------------------------------

    def step(self, state: int, labels) -> int:
        """Successor of ``state`` after reading one label set."""
        if state == self.reject:
            return state
        mask = state
        for name in labels:
            if name in self.avoid:
                return self.reject
            bit = self._bit.get(name)
            if bit is not None:
                mask |= bit
        return mask

    def run(self, trace, state: int | None = None) -> int:
        """Run the automaton over a trace of label sets."""
        state = self.initial if state is None else state
        for labels in trace:
            state = self.step(state, labels)
        return state

    # -- state queries ----------------------------------------------------------

    def is_accepting(self, state: int) -> bool:
        return state in self.accepting

    def verdict(self, state: int) -> PrefixVerdict:
        if state == self.reject:
            return PrefixVerdict.VIOLATED
        if state in self.accepting:
            return PrefixVerdict.SATISFIED
        return PrefixVerdict.PENDING

    def subset_of_state(self, state: int) -> frozenset[str] | None:
        """Visited propositions encoded by ``state`` (None for reject)."""
        if state == self.reject:
            return None
        return frozenset(p for i, p in enumerate(self.propositions) if state >> i & 1)

    def state_for_visited(self, visited) -> int:
        """State reached after visiting exactly ``visited`` propositions.

        This is the mapping between shared subsets and per-hypothesis states:
        any visited set touching the avoid set lands in reject.
        """
        visited = frozenset(visited)
        if visited & self.avoid:
            if self.reject is None:
                raise ValueError("shared automaton has no reject state")
            return self.reject
        mask = 0
        for name in visited:
            bit = self._bit.get(name)
            if bit is not None:
                mask |= bit
        return mask

    def state_label(self, state: int) -> str:
        if state == self.reject:
            return "reject"
        subset = self.subset_of_state(state)
        return "+".join(sorted(subset)) if subset else "-"

    # -- vectorized views (used by the product construction) --------------------

    def cell_bits(self, grid: GridMap) -> np.ndarray:
        """Per-cell subset bit contributed on entry (0 for untracked labels)."""
        lut = np.zeros(len(grid.regions) + 1, dtype=np.int32)
        for i, region in enumerate(grid.regions):
            lut[i + 1] = self._bit.get(region.name, 0)
        return lut[grid.label_index + 1]

    def cell_rejects(self, grid: GridMap) -> np.ndarray:
        """Per-cell flag: entering the cell hits the avoid set."""
        lut = np.zeros(len(grid.regions) + 1, dtype=bool)
        for i, region in enumerate(grid.regions):
            lut[i + 1] = region.name in self.avoid
        return lut[grid.label_index + 1]

    def dest_matrix(self, grid: GridMap) -> np.ndarray:
        """Successor state for every (state, entered cell) pair."""
        bits = self.cell_bits(grid)
        dest = np.arange(self.n_subsets, dtype=np.int32)[:, None] | bits[None, :]
        if self.reject is not None:
            dest[:, self.cell_rejects(grid)] = self.reject
            dest = np.vstack([dest, np.full((1, grid.n_cells), self.reject, dtype=np.int32)])
        return dest

    def __repr__(self):
        return (
            f"SafetyGuaranteeAutomaton(kind={self.kind!r}, "
            f"propositions={list(self.propositions)}, states={self.n_states})"
        )


def build_automaton(formula: IntentFormula) -> SafetyGuaranteeAutomaton:
    """Automaton for one formula: 2^|reach| subset states plus a reject state.

    The reject state is always materialized (it is simply unreachable when
    the avoid set is empty).  With an empty reach set the initial state is
    already accepting.
    """
    reach_order = tuple(sorted(formula.reach))
    accepting = frozenset(((1 << len(reach_order)) - 1,))
    return SafetyGuaranteeAutomaton(
        kind=KIND_HYPOTHESIS,
        propositions=reach_order,
        avoid=formula.avoid,
        accepting=accepting,
        formula=formula,
    )


def build_shared_automaton(propositions) -> SafetyGuaranteeAutomaton:
    """Subset automaton over all K propositions, shared across hypotheses.

    No reject state and no fixed accepting set: each hypothesis designates
    its own accepting subset (its reach set) when costs are extracted.
    """
    props = tuple(propositions)
    if not props:
        raise FormulaError("need at least one proposition")
    if len(set(props)) != len(props):
        raise FormulaError(f"duplicate propositions: {list(props)}")
    return SafetyGuaranteeAutomaton(
        kind=KIND_SHARED,
        propositions=props,
        avoid=frozenset(),
        accepting=frozenset(),
    )
