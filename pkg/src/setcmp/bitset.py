"""Subsets of a ground set [n] as integer bit masks.

Bit i of a mask corresponds to ground-set element i (0-based). Masks are
plain Python ints, so any n works for representation; enumeration helpers
guard against exponential blowups at their call sites.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator

import numpy as np

from .errors import CapacityError, InputError


def mask_of(*elements: int) -> int:
    """Build a mask from individual element indices."""
    value = 0
    for e in elements:
        value |= 1 << e
    return value


def mask_from(elements: Iterable[int]) -> int:
    value = 0
    for e in elements:
        value |= 1 << e
    return value


def elements(mask: int) -> list[int]:
    """Element indices present in the mask, ascending."""
    out = []
    idx = 0
    while mask:
        if mask & 1:
            out.append(idx)
        mask >>= 1
        idx += 1
    return out


def popcount(mask: int) -> int:
    return mask.bit_count()


def check_fits(mask: int, n: int) -> None:
    """Reject masks with bits at or above position n, or negative values."""
    if mask < 0 or (mask >> n) != 0:
        raise InputError(f"mask {mask:#x} does not fit ground set of size {n}")


def all_masks(n: int) -> range:
    """Every subset of [n]; 2**n values, so keep n small."""
    if n > 24:
        raise CapacityError(f"refusing to enumerate 2**{n} subsets")
    return range(1 << n)


def masks_of_size(n: int, k: int) -> Iterator[int]:
    """All masks over [n] with exactly k bits, in increasing integer order.

    Uses Gosper's hack, which walks same-popcount masks in numeric order;
    combined with an outer loop over k this yields the fixed
    cardinality-then-numeric enumeration used throughout the package.
    """
    if k < 0 or k > n:
        return
    if k == 0:
        yield 0
        return
    limit = 1 << n
    v = (1 << k) - 1
    while v < limit:
        yield v
        low = v & -v
        ripple = v + low
        v = ripple | (((v ^ ripple) >> 2) // low)


def masks_up_to_size(n: int, kmax: int, include_empty: bool = True) -> list[int]:
    """All masks of cardinality <= kmax, cardinality-then-numeric order."""
    out: list[int] = []
    start = 0 if include_empty else 1
    for k in range(start, min(kmax, n) + 1):
        out.extend(masks_of_size(n, k))
    return out


def count_up_to_size(n: int, kmax: int, include_empty: bool = True) -> int:
    from math import comb

    start = 0 if include_empty else 1
    return sum(comb(n, k) for k in range(start, min(kmax, n) + 1))


def bits_matrix(masks: Iterable[int], n: int) -> np.ndarray:
    """(len(masks), n) float64 0/1 matrix; row r, column i is bit i of masks[r]."""
    ms = list(masks)
    out = np.zeros((len(ms), n), dtype=np.float64)
    for r, m in enumerate(ms):
        idx = 0
        while m:
            if m & 1:
                out[r, idx] = 1.0
            m >>= 1
            idx += 1
    return out


def pack_rows(bits: np.ndarray) -> list[int]:
    """Inverse of bits_matrix for boolean input: one mask per row."""
    packed = np.packbits(bits.astype(np.uint8), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]
