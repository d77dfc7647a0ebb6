"""Pairwise-comparison access to a hidden set function.

The oracle is the only training-time window onto the target: it answers
"is f(S) <= f(S')?" and counts every answer. Sorting and landmark location
are built from compare calls alone so their query costs are visible in the
counter. Ground-truth values never leak through this interface.
"""
from __future__ import annotations

import threading

from .bitset import check_fits
from .errors import InvariantError
from .setfn import SetFunction
from .values import value_le


class ComparisonOracle:
    """Answers f(S) <= f(S') for a hidden target, with a query counter.

    Ties resolve as <= under the shared relative tolerance. The counter is
    lock-protected so concurrent learners may share one oracle; evaluation
    results are cached internally (pure target), which does not affect
    counting.
    """

    def __init__(self, target: SetFunction):
        self._target = target
        self._cache: dict[int, float] = {}
        self._count = 0
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return self._target.n

    @property
    def query_count(self) -> int:
        return self._count

    def _value(self, mask: int) -> float:
        v = self._cache.get(mask)
        if v is None:
            v = self._target.value(mask)
            self._cache[mask] = v
        return v

    def compare(self, a: int, b: int) -> int:
        """1 if f(a) <= f(b) else 0; increments the counter by exactly one."""
        check_fits(a, self.n)
        check_fits(b, self.n)
        with self._lock:
            self._count += 1
        return 1 if value_le(self._value(a), self._value(b)) else 0


def oracle_sort(oracle: ComparisonOracle, masks: list[int]) -> list[int]:
    """Stable merge-sort permutation ordering masks by nondecreasing value.

    Returns indices into ``masks``; applying them yields f-sorted order.
    Uses at most m*ceil(log2 m) compare calls. Ties keep input order
    because the merge takes from the left run on compare == 1.
    """
    idx = list(range(len(masks)))

    def merge_sort(lo: int, hi: int) -> list[int]:
        if hi - lo <= 1:
            return idx[lo:hi]
        mid = (lo + hi) // 2
        left = merge_sort(lo, mid)
        right = merge_sort(mid, hi)
        out = []
        i = j = 0
        while i < len(left) and j < len(right):
            if oracle.compare(masks[left[i]], masks[right[j]]) == 1:
                out.append(left[i])
                i += 1
            else:
                out.append(right[j])
                j += 1
        out.extend(left[i:])
        out.extend(right[j:])
        return out

    return merge_sort(0, len(masks))


def locate(
    oracle: ComparisonOracle, mask: int, sorted_masks: list[int], audit: bool = False
) -> int:
    """Interval index of f(mask) within oracle-sorted landmarks.

    Returns t in [0, m]: the number of landmarks L with f(L) <= f(mask),
    found by binary search in O(log m) compare calls. Index 0 means the
    value lies below every landmark, m means at or above all of them; a
    value equal to a landmark lands on that landmark's interval.

    From t, membership and label in every landmark-pair training set follow
    without further queries: for a pair (i, j) (0-based, i < j) the sample
    is negative iff t <= i (strictly below landmark i) and positive iff
    t >= j + 1 (at or above landmark j).

    ``audit`` verifies sortedness first (m-1 extra queries) and raises on a
    contract violation; intended for tests and debugging.
    """
    if audit:
        for a, b in zip(sorted_masks, sorted_masks[1:]):
            if oracle.compare(a, b) != 1:
                raise InvariantError("locate was handed an unsorted landmark list")
    lo, hi = 0, len(sorted_masks)  # invariant: lo <= t <= hi
    while lo < hi:
        mid = (lo + hi) // 2
        if oracle.compare(sorted_masks[mid], mask) == 1:
            lo = mid + 1
        else:
            hi = mid
    return lo
