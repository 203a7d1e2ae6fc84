"""Deterministic seed derivation.

Sub-streams (per simulation, per episode, per monitor step) are derived from a
base seed with a splitmix64 scrambler: ``derive_seed(seed, i)`` is
``mix64(mix64(seed) XOR i)``.  The scheme is stated here so results can be
reproduced independently of this code.
"""

_MASK64 = (1 << 64) - 1


def mix64(x: int) -> int:
    """One splitmix64 scrambling step (64-bit)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base: int, *keys: int) -> int:
    """Derive a child seed from ``base`` and one or more integer keys."""
    state = mix64(base & _MASK64)
    for key in keys:
        state = mix64(state ^ (key & _MASK64))
    return state
