"""Shared tie semantics for real-valued function comparisons.

Integer-weighted constructions compare exactly; everything else treats
values within a relative 1e-9 of each other as equal, so oracle answers
are reproducible on floating-point targets.
"""
from __future__ import annotations

REL_TOL = 1e-9


def values_close(a: float, b: float) -> bool:
    if a == b:
        return True
    return abs(a - b) <= REL_TOL * max(abs(a), abs(b))


def value_le(a: float, b: float) -> bool:
    """a <= b with ties resolved by values_close."""
    return a <= b or values_close(a, b)
