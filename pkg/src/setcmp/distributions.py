"""Subset distributions used to draw training and evaluation samples."""
from __future__ import annotations

import numpy as np

from .bitset import pack_rows
from .errors import InputError


class ProductSubsets:
    """Each element included independently with probability p."""

    def __init__(self, n: int, p: float):
        if not (0.0 <= p <= 1.0):
            raise InputError("inclusion probability must lie in [0,1]")
        self.n = n
        self.p = p

    def draw(self, rng: np.random.Generator, count: int) -> list[int]:
        if count == 0:
            return []
        bits = rng.random((count, self.n)) < self.p
        return pack_rows(bits)

    def descriptor(self) -> dict:
        return {"kind": "product", "n": self.n, "p": self.p}


class UniformSubsets(ProductSubsets):
    """Uniform over all 2**n subsets."""

    def __init__(self, n: int):
        super().__init__(n, 0.5)

    def descriptor(self) -> dict:
        return {"kind": "uniform", "n": self.n}


class FixedSequence:
    """Deterministic draw source for tests; yields a preset list in order."""

    def __init__(self, masks: list[int], n: int):
        self.masks = list(masks)
        self.n = n
        self._pos = 0

    def draw(self, rng: np.random.Generator, count: int) -> list[int]:
        if self._pos + count > len(self.masks):
            raise InputError("fixed sequence exhausted")
        out = self.masks[self._pos : self._pos + count]
        self._pos += count
        return out

    def descriptor(self) -> dict:
        return {"kind": "fixed", "n": self.n, "size": len(self.masks)}


def make_distribution(doc: dict):
    """Distribution from a descriptor dict (uniform or product)."""
    kind = doc.get("kind", "uniform")
    if kind == "uniform":
        return UniformSubsets(doc["n"])
    if kind == "product":
        return ProductSubsets(doc["n"], doc["p"])
    raise InputError(f"unknown distribution kind {kind!r}")
