"""Avoid/reach intent formulas and their finite-trace semantics.

An intent is a conjunction of "never enter" terms (``G !p``) over an avoid
set and "eventually visit" terms (``F p``) over a reach set.  This fragment
is exactly what a finite observation prefix can settle: a prefix violates the
intent as soon as it touches an avoided region and satisfies it once every
reach region has been visited without a violation.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

from .errors import FormulaError, PatternError

_MAX_ENUMERATION_PROPS = 20

_TOKEN_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|&|!)")


class PrefixVerdict(enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    PENDING = "pending"


@dataclass(frozen=True)
class IntentFormula:
    """One hypothesis: visit every region in ``reach``, never enter ``avoid``."""

    reach: frozenset[str]
    avoid: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "reach", frozenset(self.reach))
        object.__setattr__(self, "avoid", frozenset(self.avoid))
        clash = self.reach & self.avoid
        if clash:
            raise FormulaError(
                f"propositions cannot be both reached and avoided: {sorted(clash)}"
            )

    @property
    def propositions(self) -> frozenset[str]:
        return self.reach | self.avoid

    @property
    def canonical(self) -> str:
        """Stable identifier: sorted F-terms, then sorted G!-terms."""
        terms = [f"F {p}" for p in sorted(self.reach)]
        terms += [f"G !{p}" for p in sorted(self.avoid)]
        return " & ".join(terms)

    def __str__(self):
        return self.canonical

    def __repr__(self):
        return f"IntentFormula({self.canonical!r})"


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise FormulaError(f"unexpected character {rest[0]!r} at position {pos}")
        tokens.append((match.group(1), match.start(1)))
        pos = match.end()
    return tokens


def parse_formula(text: str) -> IntentFormula:
    """Parse ``term ("&" term)*`` with term ``F <name>`` or ``G !<name>``.

    Anything else (nesting, Until, double temporal operators) is outside the
    supported safety/guarantee fragment and rejected.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise FormulaError("empty formula")
    reach: set[str] = set()
    avoid: set[str] = set()
    i = 0
    while True:
        if i >= len(tokens):
            raise FormulaError("dangling '&': expected another term")
        op, pos = tokens[i]
        if op == "F":
            if i + 1 >= len(tokens) or tokens[i + 1][0] in ("F", "G", "&", "!"):
                raise FormulaError(
                    f"expected a proposition after 'F' at position {pos}: "
                    "outside safety/guarantee fragment"
                )
            reach.add(tokens[i + 1][0])
            i += 2
        elif op == "G":
            if i + 1 >= len(tokens) or tokens[i + 1][0] != "!":
                raise FormulaError(
                    f"expected '!' after 'G' at position {pos}: "
                    "outside safety/guarantee fragment"
                )
            if i + 2 >= len(tokens) or tokens[i + 2][0] in ("F", "G", "&", "!"):
                raise FormulaError(
                    f"expected a proposition after 'G !' at position {pos}: "
                    "outside safety/guarantee fragment"
                )
            avoid.add(tokens[i + 2][0])
            i += 3
        else:
            raise FormulaError(
                f"unexpected token {op!r} at position {pos}: "
                "outside safety/guarantee fragment"
            )
        if i == len(tokens):
            break
        if tokens[i][0] != "&":
            raise FormulaError(
                f"expected '&' at position {tokens[i][1]}, got {tokens[i][0]!r}"
            )
        i += 1
    return IntentFormula(reach=frozenset(reach), avoid=frozenset(avoid))


def enumerate_hypotheses(propositions: Sequence[str]) -> list[IntentFormula]:
    """All 2^K avoid/reach partitions of ``propositions``.

    Ordered by interpreting the reach set as a K-bit counter (bit i selects
    ``propositions[i]``), so the first hypothesis avoids everything and the
    last visits everything.
    """
    props = list(propositions)
    if not props:
        raise FormulaError("need at least one proposition")
    if len(set(props)) != len(props):
        raise FormulaError(f"duplicate propositions: {props}")
    if len(props) > _MAX_ENUMERATION_PROPS:
        raise FormulaError(
            f"refusing to enumerate 2^{len(props)} hypotheses "
            f"(limit is {_MAX_ENUMERATION_PROPS} propositions)"
        )
    out = []
    for mask in range(1 << len(props)):
        reach = frozenset(p for i, p in enumerate(props) if mask >> i & 1)
        avoid = frozenset(p for i, p in enumerate(props) if not mask >> i & 1)
        out.append(IntentFormula(reach=reach, avoid=avoid))
    return out


_PATTERNS = ("avoid", "cover", "reach-while-avoid")
_UNSUPPORTED = ("sequencing", "first-then-second")


def expand_pattern(pattern: str, propositions: Sequence[str]) -> list[IntentFormula]:
    """Fill a formula pattern's holes with all choices of distinct propositions."""
    props = list(dict.fromkeys(propositions))
    if pattern in _UNSUPPORTED:
        raise PatternError(f"pattern {pattern!r} (ordered visits) is not supported")
    if pattern not in _PATTERNS:
        raise PatternError(f"unknown pattern {pattern!r}; choose from {_PATTERNS}")
    holes = 2 if pattern == "reach-while-avoid" else 1
    if len(props) < holes:
        raise PatternError(
            f"pattern {pattern!r} needs {holes} distinct propositions, got {len(props)}"
        )
    seen: dict[IntentFormula, None] = {}
    for combo in permutations(props, holes):
        if pattern == "avoid":
            formula = IntentFormula(reach=frozenset(), avoid=frozenset(combo))
        elif pattern == "cover":
            formula = IntentFormula(reach=frozenset(combo), avoid=frozenset())
        else:
            formula = IntentFormula(reach=frozenset(combo[:1]), avoid=frozenset(combo[1:]))
        seen.setdefault(formula, None)
    return list(seen)


def hypotheses_to_json(hypotheses: Iterable[IntentFormula]) -> str:
    """Serialize a hypothesis list as a JSON array of canonical strings."""
    return json.dumps([h.canonical for h in hypotheses])


def hypotheses_from_json(text: str) -> list[IntentFormula]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormulaError(f"invalid hypothesis JSON: {exc.msg}") from exc
    if not isinstance(data, list) or any(not isinstance(s, str) for s in data):
        raise FormulaError("hypothesis JSON must be an array of formula strings")
    return [parse_formula(s) for s in data]


def evaluate_prefix(
    formula: IntentFormula, trace: Iterable[Iterable[str]]
) -> PrefixVerdict:
    """Classify a finite trace of label sets directly, without automata.

    Touching any avoided region anywhere in the trace is a violation (the
    "never enter" terms keep applying after the reach set is covered);
    otherwise the trace satisfies the intent once every reach proposition has
    appeared, and is pending until then.
    """
    visited: set[str] = set()
    for labels in trace:
        labels = frozenset(labels)
        if labels & formula.avoid:
            return PrefixVerdict.VIOLATED
        visited |= labels & formula.reach
    if visited >= formula.reach:
        return PrefixVerdict.SATISFIED
    return PrefixVerdict.PENDING
