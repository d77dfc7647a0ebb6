"""Comparator training pipelines and the pairwise predictor.

Training discretizes the target's range with a sorted sample of landmark
sets, then tries to learn one linear separator per landmark pair (i, j):
sets valued strictly below landmark i are negatives, sets valued at or
above landmark j are positives. Pairs whose separator meets the acceptance
rule enter R; R is then pruned to its minimal (innermost) pairs. The
predictor answers 1 on (S, S') iff some surviving separator scores S
strictly below and S' strictly above its threshold.

Two modes:

* multiplicative: a pair is accepted iff its separator has zero training
  error (exact LP feasibility).
* additive: separators come from the tolerant trainer and a pair is
  accepted iff its error count over the whole training set is at most
  eps / (4 m^2); the feature space is a parity map whose degree is the
  smaller of the theory-driven value and a configured cap.

Each sample's memberships in all pair training sets derive from a single
binary-searched interval index, so training costs O(|S2| log m) oracle
calls rather than one pass per pair.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from math import ceil, log, sqrt
from typing import Callable, Optional

import numpy as np

from .bitset import check_fits
from .errors import CapacityError, InputError, InvariantError
from .featmap import FeatureMap, embed_many, map_from_descriptor, parity_map
from .oracle import ComparisonOracle, locate, oracle_sort
from .septrain import LinearSeparator, count_errors, train_realizable, train_tolerant

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Multiplicative:
    alpha: float

    def __post_init__(self):
        if self.alpha < 1.0:
            raise InputError(f"multiplicative separation must be >= 1, got {self.alpha}")


@dataclass(frozen=True)
class Additive:
    beta: float
    degree_cap: Optional[int] = None

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise InputError(f"additive separation must lie in (0,1), got {self.beta}")


@dataclass(frozen=True)
class TrainConfig:
    epsilon: float
    delta: float
    mode: Multiplicative | Additive
    landmark_count_override: Optional[int] = None
    train_set_size_override: Optional[int] = None
    sample_constant: float = 1.0
    adjacent_only: bool = False

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0) or not (0.0 < self.delta < 1.0):
            raise InputError("epsilon and delta must lie in (0,1)")
        if self.sample_constant <= 0:
            raise InputError("sample_constant must be positive")


def landmark_count(cfg: TrainConfig) -> int:
    """m = ceil((2/eps) ln(1/(eps delta))) unless overridden."""
    if cfg.landmark_count_override is not None:
        if cfg.landmark_count_override < 1:
            raise InputError("landmark count must be at least 1")
        return cfg.landmark_count_override
    return max(1, ceil((2.0 / cfg.epsilon) * log(1.0 / (cfg.epsilon * cfg.delta))))


def train_set_size(cfg: TrainConfig, m: int, dim: int) -> int:
    """|S2| = ceil(c0 (m^2/eps) (dim ln(m^2/eps) + ln(1/delta))) unless overridden."""
    if cfg.train_set_size_override is not None:
        if cfg.train_set_size_override < 0:
            raise InputError("train set size must be nonnegative")
        return cfg.train_set_size_override
    ratio = m * m / cfg.epsilon
    return max(1, ceil(cfg.sample_constant * ratio * (dim * log(ratio) + log(1.0 / cfg.delta))))


def additive_gamma(epsilon: float, delta: float, beta: float) -> float:
    """gamma = beta / (1 + (2/eps) ln(1/(eps delta)) sqrt(2/eps))."""
    return beta / (1.0 + (2.0 / epsilon) * log(1.0 / (epsilon * delta)) * sqrt(2.0 / epsilon))


def additive_theory_degree(gamma: float) -> int:
    """Theory-driven parity degree ceil((25/gamma^{4/5}) ln(2^{1/3}/gamma))."""
    return ceil((25.0 / gamma ** 0.8) * log(2.0 ** (1.0 / 3.0) / gamma))


def prune_minimal(pairs: set[tuple[int, int]] | list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Keep only pairs not strictly containing another accepted pair.

    (i, j) is dropped when some distinct (i', j') has i <= i' and j >= j'.
    The result is sorted ascending by (i, j).
    """
    ps = sorted(set(pairs))
    for i, j in ps:
        if i >= j:
            raise InputError(f"pair ({i},{j}) must satisfy i < j")
    kept = [
        (i, j)
        for (i, j) in ps
        if not any((i2, j2) != (i, j) and i <= i2 and j >= j2 for (i2, j2) in ps)
    ]
    return kept


def _assert_minimal(pairs: list[tuple[int, int]]) -> None:
    for a in pairs:
        for b in pairs:
            if a != b and a[0] <= b[0] and a[1] >= b[1]:
                raise InvariantError(f"R contains nested pairs {a} and {b}")


@dataclass(frozen=True)
class Comparator:
    """Trained pairwise predictor: landmarks, accepted pairs, separators."""

    n: int
    landmarks: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    separators: dict[tuple[int, int], LinearSeparator]
    fmap: FeatureMap
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        _assert_minimal(list(self.pairs))
        for p in self.pairs:
            if p not in self.separators:
                raise InvariantError(f"accepted pair {p} has no stored separator")

    def predict(self, a: int, b: int) -> int:
        return predict(self, a, b)


def predict(cmp: Comparator, a: int, b: int) -> int:
    """1 iff some accepted separator scores a strictly below and b strictly above.

    Scans pairs in ascending (i, j) order and fires on the first strict
    sandwich score(a) < theta < score(b); makes no oracle calls.
    """
    check_fits(a, cmp.n)
    check_fits(b, cmp.n)
    xs = embed_many(cmp.fmap, [a, b])
    for pair in cmp.pairs:
        sep = cmp.separators[pair]
        sa = float(xs[0] @ sep.w)
        sb = float(xs[1] @ sep.w)
        if sa < sep.theta < sb:
            return 1
    return 0


@dataclass
class TrainDetails:
    """Training internals exposed for tests and audits."""

    landmarks: list[int]
    train_masks: list[int]
    intervals: np.ndarray
    attempted_pairs: list[tuple[int, int]]
    accepted_pre_prune: list[tuple[int, int]]
    pair_error_counts: dict[tuple[int, int], int]
    pair_sample_counts: dict[tuple[int, int], int]


def _draw_split(dist, rng: np.random.Generator, m: int, s2_size: int):
    """Draw the full sample, then remove m landmarks uniformly at random."""
    total = dist.draw(rng, m + s2_size)
    landmark_idx = set(int(i) for i in rng.choice(len(total), size=m, replace=False))
    landmarks = [total[i] for i in sorted(landmark_idx)]
    train = [total[i] for i in range(len(total)) if i not in landmark_idx]
    return landmarks, train


def _pair_list(m: int, adjacent_only: bool) -> list[tuple[int, int]]:
    if adjacent_only:
        return [(i, i + 1) for i in range(m - 1)]
    return [(i, j) for i in range(m) for j in range(i + 1, m)]


def _train_core(
    oracle: ComparisonOracle,
    fmap: FeatureMap,
    config: TrainConfig,
    dist,
    seed: int,
    tolerant: bool,
    provenance_extra: Optional[dict] = None,
) -> tuple[Comparator, TrainDetails]:
    rng = np.random.default_rng(seed)
    start_queries = oracle.query_count
    m = landmark_count(config)
    s2_size = train_set_size(config, m, fmap.dim)
    raw_landmarks, train_masks = _draw_split(dist, rng, m, s2_size)
    order = oracle_sort(oracle, raw_landmarks)
    landmarks = [raw_landmarks[i] for i in order]

    intervals = np.fromiter(
        (locate(oracle, s, landmarks) for s in train_masks), dtype=np.int64
    )
    X = embed_many(fmap, train_masks) if train_masks else np.zeros((0, fmap.dim))

    attempted = _pair_list(m, config.adjacent_only)
    accepted: dict[tuple[int, int], LinearSeparator] = {}
    err_counts: dict[tuple[int, int], int] = {}
    sample_counts: dict[tuple[int, int], int] = {}
    tol_budget = config.epsilon / (4.0 * m * m)
    for i, j in attempted:
        member = (intervals <= i) | (intervals >= j + 1)
        labels = intervals[member] >= j + 1
        Xp = X[member]
        sample_counts[(i, j)] = int(member.sum())
        if tolerant:
            sep, _frac = train_tolerant(Xp, labels, tol_budget)
            errs = count_errors(sep, Xp, labels) if len(labels) else 0
            err_counts[(i, j)] = errs
            if len(train_masks) == 0 or errs / len(train_masks) <= tol_budget:
                accepted[(i, j)] = sep
        else:
            sep = train_realizable(Xp, labels)
            if sep is not None:
                err_counts[(i, j)] = 0
                accepted[(i, j)] = sep

    pre_prune = sorted(accepted)
    kept = prune_minimal(pre_prune) if pre_prune else []
    provenance = {
        "config": _config_doc(config),
        "seed": seed,
        "distribution": getattr(dist, "descriptor", lambda: {"kind": "unknown"})(),
        "m": m,
        "s2_size": len(train_masks),
        "dim": fmap.dim,
        "r_pre_prune": len(pre_prune),
        "r_size": len(kept),
        "query_count": oracle.query_count - start_queries,
    }
    if provenance_extra:
        provenance.update(provenance_extra)
    cmp = Comparator(
        n=oracle.n,
        landmarks=tuple(landmarks),
        pairs=tuple(kept),
        separators={p: accepted[p] for p in kept},
        fmap=fmap,
        provenance=provenance,
    )
    details = TrainDetails(
        landmarks=landmarks,
        train_masks=train_masks,
        intervals=intervals,
        attempted_pairs=attempted,
        accepted_pre_prune=pre_prune,
        pair_error_counts=err_counts,
        pair_sample_counts=sample_counts,
    )
    return cmp, details


def train_multiplicative(
    oracle: ComparisonOracle,
    fmap: FeatureMap,
    config: TrainConfig,
    dist,
    seed: int,
    return_details: bool = False,
):
    """Exact-feasibility pipeline: accept a pair iff its LP is feasible."""
    if not isinstance(config.mode, Multiplicative):
        raise InputError("train_multiplicative requires a Multiplicative mode config")
    cmp, details = _train_core(oracle, fmap, config, dist, seed, tolerant=False)
    return (cmp, details) if return_details else cmp


def train_additive(
    oracle: ComparisonOracle,
    config: TrainConfig,
    dist,
    seed: int,
    map_builder: Optional[Callable[[int], FeatureMap]] = None,
    return_details: bool = False,
):
    """Tolerance pipeline over a truncated parity feature space.

    Computes gamma from (epsilon, delta, beta), derives the theory degree,
    clamps it with the configured cap, then runs the shared pipeline with
    the tolerant trainer and the eps/(4 m^2) acceptance rule. The used and
    theoretical degrees land in provenance.
    """
    if not isinstance(config.mode, Additive):
        raise InputError("train_additive requires an Additive mode config")
    gamma = additive_gamma(config.epsilon, config.delta, config.mode.beta)
    theory_k = additive_theory_degree(gamma)
    cap = config.mode.degree_cap
    degree = theory_k if cap is None else min(theory_k, cap)
    if map_builder is None:
        map_builder = lambda d: parity_map(oracle.n, degree=d)  # noqa: E731
    try:
        fmap = map_builder(degree)
    except CapacityError as exc:
        raise CapacityError(
            f"additive run needs parity degree {degree} "
            f"(theory degree {theory_k}); {exc}"
        ) from exc
    extra = {
        "gamma": gamma,
        "theory_degree": theory_k,
        "degree_used": degree,
        "degree_capped": degree < theory_k,
    }
    cmp, details = _train_core(
        oracle, fmap, config, dist, seed, tolerant=True, provenance_extra=extra
    )
    return (cmp, details) if return_details else cmp


# ---------------------------------------------------------------------------
# Serialization.
# ---------------------------------------------------------------------------


def _config_doc(cfg: TrainConfig) -> dict:
    if isinstance(cfg.mode, Multiplicative):
        mode = {"type": "multiplicative", "alpha": cfg.mode.alpha}
    else:
        mode = {"type": "additive", "beta": cfg.mode.beta, "degree_cap": cfg.mode.degree_cap}
    return {
        "epsilon": cfg.epsilon,
        "delta": cfg.delta,
        "mode": mode,
        "landmark_count_override": cfg.landmark_count_override,
        "train_set_size_override": cfg.train_set_size_override,
        "sample_constant": cfg.sample_constant,
        "adjacent_only": cfg.adjacent_only,
    }


def config_from_doc(doc: dict) -> TrainConfig:
    md = doc["mode"]
    if md["type"] == "multiplicative":
        mode = Multiplicative(md["alpha"])
    elif md["type"] == "additive":
        mode = Additive(md["beta"], md.get("degree_cap"))
    else:
        raise InputError(f"unknown mode type {md['type']!r}")
    return TrainConfig(
        epsilon=doc["epsilon"],
        delta=doc["delta"],
        mode=mode,
        landmark_count_override=doc.get("landmark_count_override"),
        train_set_size_override=doc.get("train_set_size_override"),
        sample_constant=doc.get("sample_constant", 1.0),
        adjacent_only=doc.get("adjacent_only", False),
    )


def to_doc(cmp: Comparator) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": cmp.n,
        "landmarks": list(cmp.landmarks),
        "pairs": [list(p) for p in cmp.pairs],
        "separators": [
            {
                "i": i,
                "j": j,
                "w": [float(x) for x in cmp.separators[(i, j)].w],
                "theta": cmp.separators[(i, j)].theta,
            }
            for i, j in cmp.pairs
        ],
        "feature_map": cmp.fmap.descriptor(),
        "provenance": cmp.provenance,
    }


def from_doc(doc: dict) -> Comparator:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InputError(f"unsupported comparator schema_version {doc.get('schema_version')}")
    fmap = map_from_descriptor(doc["feature_map"])
    separators = {
        (rec["i"], rec["j"]): LinearSeparator(np.array(rec["w"]), rec["theta"])
        for rec in doc["separators"]
    }
    return Comparator(
        n=doc["n"],
        landmarks=tuple(doc["landmarks"]),
        pairs=tuple((i, j) for i, j in doc["pairs"]),
        separators=separators,
        fmap=fmap,
        provenance=doc.get("provenance", {}),
    )


def to_json(cmp: Comparator) -> str:
    return json.dumps(to_doc(cmp), sort_keys=True, indent=2)


def from_json(text: str) -> Comparator:
    return from_doc(json.loads(text))
