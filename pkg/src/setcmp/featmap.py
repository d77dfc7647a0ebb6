"""Feature maps that make an approximating linear function exist.

Every map fixes an enumeration of feature subsets (cardinality-ascending,
then numeric mask order, version tag 1) so that a weight vector is
meaningful across runs and serialized models. Maps are immutable and
embedding is pure.

Why there is no power/root anywhere: several target classes are sandwiched
by the p-th power of a linear score, but x < y iff x**p < y**p for
positive x, y, so order comparisons against a threshold never need the
root. Comparisons happen directly in the linear score space.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log, sqrt
from typing import Optional

import numpy as np

from .bitset import (
    bits_matrix,
    check_fits,
    count_up_to_size,
    masks_of_size,
    masks_up_to_size,
    popcount,
)
from .errors import CapacityError, InputError

ENUMERATION_VERSION = 1

DIM_GUARD = 5_000_000
OR_N_GUARD = 16

KINDS = ("characteristic", "monomial", "intersect", "parity", "or")


@dataclass(frozen=True)
class FeatureMap:
    kind: str
    n: int
    degree: Optional[int] = None
    support: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown feature map kind {self.kind!r}")

    @property
    def feature_masks(self) -> Optional[list[int]]:
        """Subset enumeration backing each coordinate; None for characteristic."""
        if self.kind == "characteristic":
            return None
        if self.kind == "monomial":
            return masks_up_to_size(self.n, self.degree, include_empty=True)
        if self.kind == "intersect":
            return masks_up_to_size(self.n, self.degree, include_empty=False)
        if self.kind == "parity":
            if self.support is not None:
                return list(self.support)
            return masks_up_to_size(self.n, self.degree, include_empty=True)
        # or-indicator: every nonempty subset
        return list(range(1, 1 << self.n))

    @property
    def dim(self) -> int:
        if self.kind == "characteristic":
            return self.n
        if self.kind == "monomial":
            return count_up_to_size(self.n, self.degree, include_empty=True)
        if self.kind == "intersect":
            return count_up_to_size(self.n, self.degree, include_empty=False)
        if self.kind == "parity":
            if self.support is not None:
                return len(self.support)
            return count_up_to_size(self.n, self.degree, include_empty=True)
        return (1 << self.n) - 1

    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "degree": self.degree,
            "support": list(self.support) if self.support is not None else None,
            "enumeration_version": ENUMERATION_VERSION,
        }


def map_from_descriptor(doc: dict) -> FeatureMap:
    if doc.get("enumeration_version") != ENUMERATION_VERSION:
        raise InputError("feature enumeration version mismatch")
    support = doc.get("support")
    return _guarded(
        FeatureMap(
            doc["kind"],
            doc["n"],
            degree=doc.get("degree"),
            support=tuple(support) if support is not None else None,
        )
    )


def _guarded(fm: FeatureMap) -> FeatureMap:
    if fm.kind == "or" and fm.n > OR_N_GUARD:
        raise CapacityError(
            f"or-indicator map needs dimension 2**{fm.n}-1 = {(1 << fm.n) - 1}, "
            f"beyond the n <= {OR_N_GUARD} guard"
        )
    if fm.kind in ("monomial", "intersect") or (fm.kind == "parity" and fm.support is None):
        if fm.degree is None or fm.degree < 0:
            raise InputError(f"{fm.kind} map needs a nonnegative degree")
        if fm.degree > fm.n:
            raise InputError(f"degree {fm.degree} exceeds n={fm.n}")
        d = fm.dim
        if d > DIM_GUARD:
            raise CapacityError(f"{fm.kind} map dimension {d} exceeds guard {DIM_GUARD}")
    if fm.kind == "parity" and fm.support is not None:
        if len(set(fm.support)) != len(fm.support):
            raise InputError("parity support must be distinct")
        for t in fm.support:
            check_fits(t, fm.n)
    return fm


def characteristic_map(n: int) -> FeatureMap:
    return _guarded(FeatureMap("characteristic", n))


def monomial_map(n: int, degree: int) -> FeatureMap:
    return _guarded(FeatureMap("monomial", n, degree=degree))


def intersect_map(n: int, degree: int) -> FeatureMap:
    return _guarded(FeatureMap("intersect", n, degree=degree))


def parity_map(
    n: int, degree: Optional[int] = None, support: Optional[list[int]] = None
) -> FeatureMap:
    if (degree is None) == (support is None):
        raise InputError("parity map takes exactly one of degree or support")
    return _guarded(
        FeatureMap("parity", n, degree=degree, support=tuple(support) if support else None)
    )


def or_map(n: int) -> FeatureMap:
    return _guarded(FeatureMap("or", n))


def pair_support(n: int) -> list[int]:
    """The empty set plus all 2-element masks; spans every graph cut on [n]."""
    return [0] + list(masks_of_size(n, 2))


def embed_many(fm: FeatureMap, masks: list[int]) -> np.ndarray:
    """(len(masks), dim) feature matrix; rows follow the input order."""
    for m in masks:
        check_fits(m, fm.n)
    sbits = bits_matrix(masks, fm.n)
    if fm.kind == "characteristic":
        return sbits
    fmasks = fm.feature_masks
    fbits = bits_matrix(fmasks, fm.n)
    inter = sbits @ fbits.T  # |T & S| per (sample, feature)
    if fm.kind == "parity":
        return 1.0 - 2.0 * (inter % 2.0)
    if fm.kind == "monomial":
        sizes = np.array([popcount(t) for t in fmasks], dtype=np.float64)
        return (inter >= sizes[None, :] - 0.5).astype(np.float64)
    # intersect and or-indicator: 1 iff T & S nonempty
    return (inter > 0.5).astype(np.float64)


def embed(fm: FeatureMap, mask: int) -> np.ndarray:
    """Feature vector of a single subset."""
    return embed_many(fm, [mask])[0]


def select_map(class_tag: str, n: int, **params) -> tuple[FeatureMap, float]:
    """Feature map plus declared separation factor for a function class.

    Tags and their (map, separation):
      modular          -> characteristic, 1
      submodular       -> characteristic, sqrt(n)
      xos              -> characteristic, c * sqrt(n)   (c defaults to 1)
      subadditive      -> characteristic, sqrt(n) * ln n (clamped to >= 1)
      curvature        -> characteristic, min(sqrt(n), 1/(1-kappa))
      xos-trees        -> monomial(ceil(1/xi)), trees**xi
      interaction      -> intersect(k), 1
      fourier          -> parity(support | degree), 1
      coverage-or      -> or-indicator, 1 + sep_eps
    """
    if class_tag == "modular":
        return characteristic_map(n), 1.0
    if class_tag == "submodular":
        return characteristic_map(n), sqrt(n)
    if class_tag == "xos":
        c = params.get("c", 1.0)
        return characteristic_map(n), c * sqrt(n)
    if class_tag == "subadditive":
        return characteristic_map(n), max(1.0, sqrt(n) * log(n))
    if class_tag == "curvature":
        kappa = params["kappa"]
        if not (0.0 <= kappa <= 1.0):
            raise InputError("kappa must lie in [0,1]")
        if kappa >= 1.0:
            return characteristic_map(n), sqrt(n)
        return characteristic_map(n), min(sqrt(n), 1.0 / (1.0 - kappa))
    if class_tag == "xos-trees":
        xi = params["xi"]
        trees = params["trees"]
        if xi <= 0:
            raise InputError("xi must be positive")
        return monomial_map(n, ceil(1.0 / xi)), float(trees) ** xi
    if class_tag == "interaction":
        return intersect_map(n, params["k"]), 1.0
    if class_tag == "fourier":
        if "support" in params and params["support"] is not None:
            return parity_map(n, support=list(params["support"])), 1.0
        return parity_map(n, degree=params["degree"]), 1.0
    if class_tag == "coverage-or":
        sep_eps = params["sep_eps"]
        if sep_eps <= 0:
            raise InputError("sep_eps must be positive")
        return or_map(n), 1.0 + sep_eps
    raise InputError(f"unknown function class tag {class_tag!r}")
