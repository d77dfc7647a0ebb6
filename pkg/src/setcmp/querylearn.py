"""Membership-query learners built purely on comparison calls.

* ``learn_disjunction`` recovers a boolean OR function exactly with one
  comparison per ground-set element.
* ``learn_buckets`` sorts every subset up to a size bound into
  equal-value groups; the resulting predictor orders two sets by the
  highest-value group reachable from a small subset of each. It is exact
  on max-of-weighted-conjunction (pseudo-boolean DNF) targets.
* ``learn_buckets_approx`` shrinks the size bound by a divisor alpha and
  still orders correctly any pair whose values differ by more than an
  alpha factor, for monotone small-range targets.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .bitset import count_up_to_size, masks_up_to_size
from .errors import CapacityError, InputError
from .oracle import ComparisonOracle, oracle_sort

SCHEMA_VERSION = 1

ENUM_GUARD = 5_000_000


def learn_disjunction(oracle: ComparisonOracle, n: int) -> int:
    """Support of a boolean OR target, from n singleton-vs-empty comparisons.

    Element i is in the support exactly when f({i}) > f(empty), i.e. the
    oracle answers 0 on compare({i}, empty).
    """
    support = 0
    for i in range(n):
        if oracle.compare(1 << i, 0) == 0:
            support |= 1 << i
    return support


@dataclass(frozen=True)
class BucketPredictor:
    """Value-equivalence groups over all subsets of size <= s, ascending."""

    n: int
    s: int
    groups: tuple[tuple[int, ...], ...]
    query_count: int = 0

    def __post_init__(self):
        seen = set()
        for g in self.groups:
            for m in g:
                if m in seen:
                    raise InputError("bucket groups must be disjoint")
                seen.add(m)
        if len(seen) != count_up_to_size(self.n, self.s):
            raise InputError("bucket groups must cover all subsets of size <= s")


def _bucketize(oracle: ComparisonOracle, n: int, s: int) -> BucketPredictor:
    if count_up_to_size(n, s) > ENUM_GUARD:
        raise CapacityError(
            f"bucketing all subsets of size <= {s} over n={n} exceeds {ENUM_GUARD}"
        )
    start = oracle.query_count
    subsets = masks_up_to_size(n, s, include_empty=True)
    order = oracle_sort(oracle, subsets)
    ordered = [subsets[i] for i in order]
    groups: list[list[int]] = [[ordered[0]]]
    for prev, cur in zip(ordered, ordered[1:]):
        # Sortedness already gives f(prev) <= f(cur); one extra call decides
        # equality via f(cur) <= f(prev).
        if oracle.compare(cur, prev) == 1:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    return BucketPredictor(
        n=n,
        s=s,
        groups=tuple(tuple(g) for g in groups),
        query_count=oracle.query_count - start,
    )


def learn_buckets(oracle: ComparisonOracle, n: int, k: int) -> BucketPredictor:
    """Bucket all subsets of size <= 2k; exact for range-{0..k} DNF targets."""
    if k < 1:
        raise InputError("k must be at least 1")
    return _bucketize(oracle, n, min(2 * k, n))


def learn_buckets_approx(oracle: ComparisonOracle, n: int, k: int, alpha: int) -> BucketPredictor:
    """Bucket subsets of size <= 2k/alpha; alpha must divide 2k.

    With alpha = 1 this reduces to learn_buckets; larger alpha trades
    query budget for a multiplicative ordering guarantee.
    """
    if k < 1:
        raise InputError("k must be at least 1")
    if alpha < 1 or (2 * k) % alpha != 0:
        raise InputError(f"alpha={alpha} must be a positive divisor of 2k={2 * k}")
    return _bucketize(oracle, n, min((2 * k) // alpha, n))


def max_bucket_index(p: BucketPredictor, mask: int) -> int:
    """Highest group index containing some subset of ``mask``.

    Scans groups from the top with early exit; the empty set is always a
    subset, so the result is well defined.
    """
    for idx in range(len(p.groups) - 1, -1, -1):
        for t in p.groups[idx]:
            if (t & mask) == t:
                return idx
    raise InputError("bucket groups do not cover the empty set")


def bucket_predict(p: BucketPredictor, a: int, b: int) -> int:
    """1 iff the learned order says f(a) <= f(b); zero oracle calls."""
    return 1 if max_bucket_index(p, a) <= max_bucket_index(p, b) else 0


def to_doc(p: BucketPredictor) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": p.n,
        "s": p.s,
        "groups": [list(g) for g in p.groups],
        "query_count": p.query_count,
    }


def from_doc(doc: dict) -> BucketPredictor:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InputError(f"unsupported bucket schema_version {doc.get('schema_version')}")
    return BucketPredictor(
        n=doc["n"],
        s=doc["s"],
        groups=tuple(tuple(g) for g in doc["groups"]),
        query_count=doc.get("query_count", 0),
    )


def to_json(p: BucketPredictor) -> str:
    return json.dumps(to_doc(p), sort_keys=True, indent=2)


def from_json(text: str) -> BucketPredictor:
    return from_doc(json.loads(text))
