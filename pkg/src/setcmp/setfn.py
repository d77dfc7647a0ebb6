"""Synthetic combinatorial set functions: evaluation, generators, checks.

Each family is a small frozen dataclass with a ``value(mask)`` method and a
``kind`` tag. Instances are immutable and evaluation is pure, so they are
safe to share across threads. ``value_table`` produces the full 2**n table
(vectorised where it matters) and is the workhorse behind the exhaustive
property checks in ``verify_class``.

All functions serialize to a JSON document ``{schema_version, kind, n,
seed, params}``; see ``to_json`` / ``from_json``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .bitset import (
    all_masks,
    bits_matrix,
    check_fits,
    elements,
    mask_from,
    masks_up_to_size,
    popcount,
)
from .errors import CapacityError, InputError
from .values import value_le, values_close

SCHEMA_VERSION = 1

# n caps for the exhaustive modes; sampled checks handle anything larger.
EXHAUSTIVE_N_CAP = 14
TABLE_N_CAP = 20


@dataclass(frozen=True)
class SetFunction:
    """Common surface: a ground-set size, a kind tag and pure evaluation."""

    n: int
    seed: Optional[int] = field(default=None, kw_only=True)

    kind = "abstract"

    def value(self, mask: int) -> float:
        raise NotImplementedError

    def params_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Coverage(SetFunction):
    """Weight of the union of per-item universe subsets.

    ``item_masks[i]`` is a bit mask over the universe (size ``universe_size``)
    listing which universe elements item i covers.
    """

    universe_size: int = 0
    item_masks: tuple[int, ...] = ()
    weights: tuple[float, ...] = ()

    kind = "coverage"

    def __post_init__(self):
        if len(self.item_masks) != self.n:
            raise InputError("coverage needs exactly n item subsets")
        if len(self.weights) != self.universe_size:
            raise InputError("coverage needs one weight per universe element")
        if any(w < 0 for w in self.weights):
            raise InputError("coverage weights must be nonnegative")

    def value(self, mask: int) -> float:
        check_fits(mask, self.n)
        union = 0
        m = mask
        idx = 0
        while m:
            if m & 1:
                union |= self.item_masks[idx]
            m >>= 1
            idx += 1
        total = 0.0
        for u in elements(union):
            total += self.weights[u]
        return total

    def params_dict(self) -> dict:
        return {
            "universe_size": self.universe_size,
            "item_sets": [elements(m) for m in self.item_masks],
            "weights": list(self.weights),
        }


@dataclass(frozen=True)
class Xos(SetFunction):
    """Max over nonnegative linear trees: f(S) = max_j w_j . chi(S)."""

    trees: tuple[tuple[float, ...], ...] = ()

    kind = "xos"

    def __post_init__(self):
        if len(self.trees) < 1:
            raise InputError("xos needs at least one tree")
        for t in self.trees:
            if len(t) != self.n:
                raise InputError("xos tree length must equal n")
            if any(w < 0 for w in t):
                raise InputError("xos weights must be nonnegative")

    def value(self, mask: int) -> float:
        check_fits(mask, self.n)
        idxs = elements(mask)
        if not idxs:
            return 0.0
        best = 0.0
        for tree in self.trees:
            s = 0.0
            for i in idxs:
                s += tree[i]
            best = max(best, s)
        return best

    def params_dict(self) -> dict:
        return {"trees": [list(t) for t in self.trees]}


@dataclass(frozen=True)
class GraphCut(SetFunction):
    """Weighted cut: sum of w(u,v) over edges with exactly one endpoint in S."""

    edges: tuple[tuple[int, int, float], ...] = ()

    kind = "cut"

    def __post_init__(self):
        for u, v, _w in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise InputError(f"bad edge ({u},{v}) for n={self.n}")

    def value(self, mask: int) -> float:
        check_fits(mask, self.n)
        total = 0.0
        for u, v, w in self.edges:
            if ((mask >> u) & 1) != ((mask >> v) & 1):
                total += w
        return total

    def params_dict(self) -> dict:
        return {"edges": [[u, v, w] for u, v, w in self.edges]}


@dataclass(frozen=True)
class FourierSparse(SetFunction):
    """f(S) = sum over support T of coeff(T) * (-1)^{|T & S|}."""

    support: tuple[int, ...] = ()
    coeffs: tuple[float, ...] = ()

    kind = "fourier"

    def __post_init__(self):
        if len(self.support) != len(self.coeffs):
            raise InputError("fourier support and coeffs must have equal length")
        if len(set(self.support)) != len(self.support):
            raise InputError("fourier support entries must be distinct")
        for t in self.support:
            check_fits(t, self.n)

    def value(self, mask: int) -> float:
        check_fits(mask, self.n)
        total = 0.0
        for t, c in zip(self.support, self.coeffs):
            total += c if popcount(t & mask) % 2 == 0 else -c
        return total

    def params_dict(self) -> dict:
        return {"support": list(self.support), "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class Interaction(SetFunction):
    """f(S) = sum of g(T) over stored terms T that intersect S.

    Terms are nonempty masks of cardinality at most ``degree``; g(empty)
    is fixed to 0 by omission, so f(empty) = 0.
    """

    degree: int = 1
    terms: tuple[tuple[int, float], ...] = ()

    kind = "interaction"

    def __post_init__(self):
        seen = set()
        for t, _g in self.terms:
            check_fits(t, self.n)
            if t == 0:
                raise InputError("interaction term on the empty set is not allowed")
            if popcount(t) > self.degree:
                raise InputError("interaction term exceeds declared degree")
            if t in seen:
                raise InputError("duplicate interaction term")
            seen.add(t)

    def value(self, mask: int) -> float:
        check_fits(mask, self.n)
        total = 0.0
        for t, g in self.terms:
            if t & mask:
                total += g
        return total

    def params_dict(self) -> dict:
        return {"degree": self.degree, "terms": [[t, g] for t, g in self.terms]}


@dataclass(frozen=True)
class CurvatureShift(SetFunction):
    """kappa * base(S) + (1 - kappa) * |S|; pulls a function toward modularity."""

    kappa: float = 1.0
    base: SetFunction = None

    kind = "curvature"

    def __post_init__(self):
        if not (0.0 <= self.kappa <= 1.0):
            raise InputError(f"kappa must lie in [0,1], got {self.kappa}")
        if self.base is None or self.base.n != self.n:
            raise InputError("curvature shift base must match n")

    def value(self, mask: int) -> float:
        check_fits(mask, self.n)
        return self.kappa * self.base.value(mask) + (1.0 - self.kappa) * popcount(mask)

    def params_dict(self) -> dict:
        return {"kappa": self.kappa, "base": to_doc(self.base)}


@dataclass(frozen=True)
class Truncate(SetFunction):
    """min(base(S), cap); keeps monotone submodular functions in a small range."""

    cap: float = 1.0
    base: SetFunction = None

    kind = "truncate"

    def __post_init__(self):
        if self.base is None or self.base.n != self.n:
            raise InputError("truncate base must match n")

    def value(self, mask: int) -> float:
        check_fits(mask, self.n)
        return min(self.base.value(mask), self.cap)

    def params_dict(self) -> dict:
        return {"cap": self.cap, "base": to_doc(self.base)}


@dataclass(frozen=True)
class Disjunction(SetFunction):
    """Boolean OR over a support set: 1 iff S intersects the support."""

    support: int = 0

    kind = "disjunction"

    def __post_init__(self):
        check_fits(self.support, self.n)

    def value(self, mask: int) -> float:
        check_fits(mask, self.n)
        return 1.0 if (mask & self.support) else 0.0

    def params_dict(self) -> dict:
        return {"support": self.support}


@dataclass(frozen=True)
class KDnf(SetFunction):
    """Pseudo-boolean DNF: max weight over terms whose mask is contained in S.

    Terms are (weight, mask) with integer weights in 1..k and masks of
    cardinality at most 2k; the value on S is the largest weight among
    satisfied terms, or 0 when none is satisfied.
    """

    k: int = 1
    terms: tuple[tuple[int, int], ...] = ()

    kind = "kdnf"

    def __post_init__(self):
        for a, t in self.terms:
            check_fits(t, self.n)
            if not (1 <= a <= self.k):
                raise InputError(f"term weight {a} outside 1..{self.k}")
            if popcount(t) > 2 * self.k:
                raise InputError("term mask wider than 2k")

    def value(self, mask: int) -> float:
        check_fits(mask, self.n)
        best = 0
        for a, t in self.terms:
            if (t & mask) == t and a > best:
                best = a
        return float(best)

    def params_dict(self) -> dict:
        return {"k": self.k, "terms": [[a, t] for a, t in self.terms]}


def evaluate(fn: SetFunction, mask: int) -> float:
    """Ground-truth evaluation; test/eval-side only, never shown to learners."""
    return fn.value(mask)


def value_table(fn: SetFunction) -> np.ndarray:
    """f over every subset of [n] as a float array indexed by mask."""
    n = fn.n
    if n > TABLE_N_CAP:
        raise CapacityError(f"value table for n={n} exceeds the 2**{TABLE_N_CAP} guard")
    bits = bits_matrix(all_masks(n), n)
    if fn.kind == "coverage":
        items = bits_matrix(fn.item_masks, fn.universe_size)
        covered = (bits @ items) > 0.5
        return covered @ np.asarray(fn.weights, dtype=np.float64)
    if fn.kind == "xos":
        trees = np.asarray(fn.trees, dtype=np.float64)
        return (bits @ trees.T).max(axis=1)
    if fn.kind == "cut":
        vals = np.zeros(1 << n)
        for u, v, w in fn.edges:
            vals += w * (bits[:, u] != bits[:, v])
        return vals
    if fn.kind == "fourier":
        tb = bits_matrix(fn.support, n)
        parity = (bits @ tb.T) % 2.0
        signs = 1.0 - 2.0 * parity
        return signs @ np.asarray(fn.coeffs, dtype=np.float64)
    if fn.kind == "interaction":
        tb = bits_matrix([t for t, _ in fn.terms], n)
        hits = (bits @ tb.T) > 0.5
        return hits @ np.asarray([g for _, g in fn.terms], dtype=np.float64)
    if fn.kind == "curvature":
        return fn.kappa * value_table(fn.base) + (1.0 - fn.kappa) * bits.sum(axis=1)
    if fn.kind == "truncate":
        return np.minimum(value_table(fn.base), fn.cap)
    if fn.kind == "disjunction":
        return np.fromiter(
            (1.0 if m & fn.support else 0.0 for m in all_masks(n)), dtype=np.float64
        )
    if fn.kind == "kdnf":
        vals = np.zeros(1 << n)
        if fn.terms:
            sizes = np.array([popcount(t) for _, t in fn.terms], dtype=np.float64)
            tb = bits_matrix([t for _, t in fn.terms], n)
            contained = (bits @ tb.T) >= sizes[None, :] - 0.5
            for j, (a, _t) in enumerate(fn.terms):
                vals = np.maximum(vals, a * contained[:, j])
        return vals
    return np.fromiter((fn.value(m) for m in all_masks(n)), dtype=np.float64)


# ---------------------------------------------------------------------------
# Generators. All randomness flows through numpy's default_rng (PCG64), the
# single PRNG fixed for the repo, so (params, seed) fully determine output.
# ---------------------------------------------------------------------------


def gen_coverage(
    n: int,
    universe_size: int,
    density: float,
    seed: int,
    unit_weights: bool = False,
    normalize: bool = False,
) -> Coverage:
    """Random coverage instance.

    Each item covers each universe element independently with probability
    ``density``; weights are drawn from (0,1] (or fixed to 1 with
    ``unit_weights``). ``normalize`` rescales weights so the full ground set
    has value 1, which keeps the range inside [0,1].
    """
    if not (0.0 < density <= 1.0):
        raise InputError("density must lie in (0,1]; 0 would be identically zero")
    if universe_size < 1:
        raise InputError("universe_size must be at least 1")
    rng = np.random.default_rng(seed)
    covers = rng.random((n, universe_size)) < density
    item_masks = tuple(mask_from(np.flatnonzero(row)) for row in covers)
    if unit_weights:
        weights = np.ones(universe_size)
    else:
        weights = 1.0 - rng.random(universe_size)  # uniform on (0,1]
    if normalize:
        union = 0
        for m in item_masks:
            union |= m
        total = sum(weights[u] for u in elements(union))
        if total <= 0.0:
            raise InputError("cannot normalize a coverage function that is identically zero")
        weights = weights / total
    return Coverage(
        n,
        universe_size=universe_size,
        item_masks=item_masks,
        weights=tuple(float(w) for w in weights),
        seed=seed,
    )


def gen_xos(n: int, trees: int, seed: int) -> Xos:
    if trees < 1:
        raise InputError("need at least one tree")
    rng = np.random.default_rng(seed)
    w = rng.random((trees, n))
    return Xos(n, trees=tuple(tuple(float(x) for x in row) for row in w), seed=seed)


def gen_modular(n: int, seed: int, integer_weights: bool = True) -> Xos:
    """Fully additive target, represented as a single-tree max."""
    rng = np.random.default_rng(seed)
    if integer_weights:
        w = rng.integers(1, 3, size=n).astype(float)
    else:
        w = 1.0 - rng.random(n)
    return Xos(n, trees=(tuple(float(x) for x in w),), seed=seed)


def gen_cut(n: int, edge_prob: float, seed: int, unit_weights: bool = True) -> GraphCut:
    """Erdos-Renyi graph cut function with unit (or uniform (0,1]) weights."""
    if not (0.0 <= edge_prob <= 1.0):
        raise InputError("edge probability must lie in [0,1]")
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                w = 1.0 if unit_weights else float(1.0 - rng.random())
                edges.append((u, v, w))
    return GraphCut(n, edges=tuple(edges), seed=seed)


def path_cut(n: int) -> GraphCut:
    """Cut function of the path 0-1-...-(n-1) with unit weights."""
    if n < 2:
        raise InputError("a path needs at least two vertices")
    return GraphCut(n, edges=tuple((i, i + 1, 1.0) for i in range(n - 1)))


def fourier_from_cut(cut: GraphCut) -> FourierSparse:
    """Exact sparse representation of a cut function.

    cut(S) counts the edges S separates; each edge (u,v,w) contributes
    w/2 - (w/2) * (-1)^{|{u,v} & S|}, so the support is the empty set plus
    one pair mask per edge.
    """
    support = [0]
    coeffs = [sum(w for _, _, w in cut.edges) / 2.0]
    pair_coeff: dict[int, float] = {}
    for u, v, w in cut.edges:
        m = (1 << u) | (1 << v)
        pair_coeff[m] = pair_coeff.get(m, 0.0) - w / 2.0
    for m in sorted(pair_coeff):
        support.append(m)
        coeffs.append(pair_coeff[m])
    return FourierSparse(cut.n, support=tuple(support), coeffs=tuple(coeffs), seed=cut.seed)


def gen_interaction(
    n: int, degree: int, num_terms: int, seed: int, integer_coeffs: bool = True
) -> Interaction:
    """Random interaction-term valuation of the given degree.

    Draws ``num_terms`` distinct nonempty masks of cardinality <= degree and
    assigns each a coefficient (integers 1..3 by default, which keeps the
    value spectrum discrete).
    """
    pool = masks_up_to_size(n, degree, include_empty=False)
    if num_terms > len(pool):
        raise InputError(f"only {len(pool)} terms of degree <= {degree} exist")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(pool), size=num_terms, replace=False)
    terms = []
    for idx in sorted(int(i) for i in chosen):
        if integer_coeffs:
            g = float(rng.integers(1, 4))
        else:
            g = float(rng.uniform(-1.0, 1.0)) or 0.5
        terms.append((pool[idx], g))
    return Interaction(n, degree=degree, terms=tuple(terms), seed=seed)


def gen_curvature_shift(base: SetFunction, kappa: float) -> CurvatureShift:
    """Blend a monotone submodular base toward pure cardinality."""
    return CurvatureShift(base.n, kappa=kappa, base=base, seed=base.seed)


def gen_disjunction(n: int, seed: int, include_prob: float = 0.5) -> Disjunction:
    rng = np.random.default_rng(seed)
    support = mask_from(i for i in range(n) if rng.random() < include_prob)
    return Disjunction(n, support=support, seed=seed)


def gen_kdnf(n: int, k: int, num_terms: int, seed: int) -> KDnf:
    """Random pseudo-boolean 2k-DNF with weights in 1..k."""
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(num_terms):
        a = int(rng.integers(1, k + 1))
        size = int(rng.integers(1, min(2 * k, n) + 1))
        members = rng.choice(n, size=size, replace=False)
        terms.append((a, mask_from(int(i) for i in members)))
    return KDnf(n, k=k, terms=tuple(terms), seed=seed)


# ---------------------------------------------------------------------------
# Class membership checks.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_class(
    fn: SetFunction,
    prop: str,
    mode: str = "exhaustive",
    trials: int = 2000,
    seed: int = 0,
) -> CheckResult:
    """Check monotone / submodular / subadditive, exhaustively or sampled.

    Exhaustive mode enumerates every instantiation of the defining
    inequality (allowed up to n=14) and reports the first violating sets.
    Sampled mode draws random instantiations. Inequalities use the shared
    relative tolerance so float noise does not produce spurious witnesses.
    """
    if prop not in ("monotone", "submodular", "subadditive"):
        raise InputError(f"unknown property {prop!r}")
    if mode == "exhaustive":
        if fn.n > EXHAUSTIVE_N_CAP:
            raise InputError(
                f"exhaustive {prop} check refused for n={fn.n} > {EXHAUSTIVE_N_CAP}; "
                "request sampled mode"
            )
        return _verify_exhaustive(fn, prop)
    if mode == "sampled":
        return _verify_sampled(fn, prop, trials, seed)
    raise InputError(f"unknown mode {mode!r}")


def _verify_exhaustive(fn: SetFunction, prop: str) -> CheckResult:
    n = fn.n
    f = value_table(fn)
    if prop == "monotone":
        for i in range(n):
            bit = 1 << i
            for s in all_masks(n):
                if s & bit:
                    continue
                if not value_le(f[s], f[s | bit]):
                    return CheckResult(False, (s, s | bit))
        return CheckResult(True)
    if prop == "submodular":
        # Local exchange form, equivalent to the nested-set definition:
        # marginal of i may not grow when j is added first.
        for i in range(n):
            for j in range(i + 1, n):
                bi, bj = 1 << i, 1 << j
                for s in all_masks(n):
                    if s & (bi | bj):
                        continue
                    lhs = f[s | bi | bj] - f[s | bj]
                    rhs = f[s | bi] - f[s]
                    if not value_le(lhs, rhs):
                        return CheckResult(False, (s, s | bj, i))
        return CheckResult(True)
    # subadditive
    for s in all_masks(n):
        for t in all_masks(n):
            if not value_le(f[s | t], f[s] + f[t]):
                return CheckResult(False, (s, t))
    return CheckResult(True)


def _verify_sampled(fn: SetFunction, prop: str, trials: int, seed: int) -> CheckResult:
    n = fn.n
    rng = np.random.default_rng(seed)

    def draw() -> int:
        return mask_from(i for i in range(n) if rng.random() < 0.5)

    for _ in range(trials):
        if prop == "monotone":
            s = draw()
            i = int(rng.integers(n))
            t = s | (1 << i)
            if not value_le(fn.value(s), fn.value(t)):
                return CheckResult(False, (s, t))
        elif prop == "submodular":
            i, j = rng.choice(n, size=2, replace=False)
            s = draw() & ~((1 << int(i)) | (1 << int(j)))
            bi, bj = 1 << int(i), 1 << int(j)
            lhs = fn.value(s | bi | bj) - fn.value(s | bj)
            rhs = fn.value(s | bi) - fn.value(s)
            if not value_le(lhs, rhs):
                return CheckResult(False, (s, s | bj, int(i)))
        else:
            s, t = draw(), draw()
            if not value_le(fn.value(s | t), fn.value(s) + fn.value(t)):
                return CheckResult(False, (s, t))
    return CheckResult(True)


# ---------------------------------------------------------------------------
# Serialization.
# ---------------------------------------------------------------------------

_KINDS = {}
for _cls in (
    Coverage,
    Xos,
    GraphCut,
    FourierSparse,
    Interaction,
    CurvatureShift,
    Truncate,
    Disjunction,
    KDnf,
):
    _KINDS[_cls.kind] = _cls


def to_doc(fn: SetFunction) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": fn.kind,
        "n": fn.n,
        "seed": fn.seed,
        "params": fn.params_dict(),
    }


def from_doc(doc: dict) -> SetFunction:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InputError(f"unsupported function schema_version {doc.get('schema_version')}")
    kind = doc["kind"]
    n = doc["n"]
    seed = doc.get("seed")
    p = doc["params"]
    if kind == "coverage":
        return Coverage(
            n,
            universe_size=p["universe_size"],
            item_masks=tuple(mask_from(s) for s in p["item_sets"]),
            weights=tuple(p["weights"]),
            seed=seed,
        )
    if kind == "xos":
        return Xos(n, trees=tuple(tuple(t) for t in p["trees"]), seed=seed)
    if kind == "cut":
        return GraphCut(n, edges=tuple((u, v, w) for u, v, w in p["edges"]), seed=seed)
    if kind == "fourier":
        return FourierSparse(
            n, support=tuple(p["support"]), coeffs=tuple(p["coeffs"]), seed=seed
        )
    if kind == "interaction":
        return Interaction(
            n, degree=p["degree"], terms=tuple((t, g) for t, g in p["terms"]), seed=seed
        )
    if kind == "curvature":
        return CurvatureShift(n, kappa=p["kappa"], base=from_doc(p["base"]), seed=seed)
    if kind == "truncate":
        return Truncate(n, cap=p["cap"], base=from_doc(p["base"]), seed=seed)
    if kind == "disjunction":
        return Disjunction(n, support=p["support"], seed=seed)
    if kind == "kdnf":
        return KDnf(n, k=p["k"], terms=tuple((a, t) for a, t in p["terms"]), seed=seed)
    raise InputError(f"unknown set-function kind {kind!r}")


def to_json(fn: SetFunction) -> str:
    return json.dumps(to_doc(fn), sort_keys=True, indent=2)


def from_json(text: str) -> SetFunction:
    return from_doc(json.loads(text))
