"""Exception hierarchy shared across the package.

ValidationError subclasses signal bad inputs (maps, formulas, parameters) and
map to CLI exit code 2; the runtime errors map to exit code 3.
"""


class ValidationError(ValueError):
    """Invalid input data or configuration."""


class MapError(ValidationError):
    """Semantically invalid workspace map (bounds, overlaps, weights)."""


class MapFormatError(MapError):
    """Malformed map document (syntax, unknown keys, wrong types)."""


class FormulaError(ValidationError):
    """Invalid intent formula (syntax or avoid/reach clash)."""


class PatternError(FormulaError):
    """Unknown or unsupported formula pattern."""


class IllegalTransitionError(RuntimeError):
    """A move between non-adjacent cells was requested."""


class TrajectoryGapError(IllegalTransitionError):
    """An observed trajectory jumped between non-adjacent cells."""


class GenerationError(RuntimeError):
    """Random scenario generation exhausted its retry budget."""
