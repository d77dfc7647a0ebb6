"""Shared fixtures and independent brute-force evaluators.

The brute-force helpers here work on Python sets, not bit masks, so they
stay independent of the implementation paths they check.
"""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from setcmp.setfn import Coverage, GraphCut

settings.register_profile("ci", deadline=None)
settings.load_profile("ci")


def set_to_mask(s) -> int:
    m = 0
    for e in s:
        m |= 1 << e
    return m


def mask_to_set(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if (mask >> i) & 1)


def coverage_brute(item_sets: list[set], weights: list[float], chosen: set) -> float:
    """Union weight computed with plain Python sets."""
    union = set()
    for i in chosen:
        union |= item_sets[i]
    return sum(weights[u] for u in union)


def cut_brute(edges: list[tuple[int, int, float]], side: set) -> float:
    return sum(w for u, v, w in edges if (u in side) != (v in side))


def fourier_brute(support: list[frozenset], coeffs: list[float], s: set) -> float:
    total = 0.0
    for t, c in zip(support, coeffs):
        total += c * ((-1) ** len(t & s))
    return total


COV3_ITEMS = [{0}, {1}, {0, 1, 2}]
COV3_WEIGHTS = [1.0, 1.0, 1.0]


@pytest.fixture
def cov3() -> Coverage:
    """Three items over a three-element unit-weight universe.

    Values by subset: {} -> 0, {0} -> 1, {1} -> 1, {0,1} -> 2, and any set
    containing item 2 -> 3.
    """
    return Coverage(
        3,
        universe_size=3,
        item_masks=(0b001, 0b010, 0b111),
        weights=(1.0, 1.0, 1.0),
    )


@pytest.fixture
def cov3_table(cov3) -> list[float]:
    return [
        coverage_brute(COV3_ITEMS, COV3_WEIGHTS, mask_to_set(m)) for m in range(8)
    ]


@pytest.fixture
def p3() -> GraphCut:
    """Unit-weight path on three vertices: edges (0,1) and (1,2)."""
    return GraphCut(3, edges=((0, 1, 1.0), (1, 2, 1.0)))


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
