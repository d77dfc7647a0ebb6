"""Experiment harness: the separation-conditional error estimator and sweeps.

``measure_error`` operationalizes the error event behind a trained
comparator's guarantee: draw random pairs, orient each by ground truth so
f(S) <= f(S'), call the pair *separated* when the values differ by the
required multiplicative (alpha f(S) <= f(S')) or additive (f(S) + beta <=
f(S')) amount, and count a miss when a separated pair gets predict == 0.
Pairs with (tolerance-)equal values are never counted as separated: there
is no order to get wrong, and the no-separation classes are evaluated on
value-distinct pairs. Both-orientation firings are counted, not hidden.

Sweeps run one cell per (n, train size, degree cap, seed) combination with
a PRNG stream derived from (seed, cell index), and emit rows in a fixed
column order as CSV and JSON.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .comparator import (
    Additive,
    Comparator,
    Multiplicative,
    TrainConfig,
    predict,
    train_additive,
    train_multiplicative,
)
from .distributions import ProductSubsets, UniformSubsets
from .errors import InputError, SetcmpError
from .featmap import pair_support, select_map
from .oracle import ComparisonOracle
from .setfn import (
    SetFunction,
    gen_coverage,
    gen_cut,
    gen_interaction,
    gen_modular,
    gen_xos,
)
from .values import values_close


@dataclass(frozen=True)
class ErrorEstimate:
    trials: int
    miss_count: int
    separated_count: int
    conditional_error: float  # nan when no pair was separated
    vacuous: bool
    both_fire_count: int
    query_count: int

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "miss_count": self.miss_count,
            "separated_count": self.separated_count,
            "conditional_error": self.conditional_error,
            "vacuous": self.vacuous,
            "both_fire_count": self.both_fire_count,
            "query_count": self.query_count,
        }


def measure_error(
    cmp: Comparator,
    ground_truth: SetFunction,
    dist,
    trials: int,
    seed: int,
    separation: Optional[float] = None,
    mode: Optional[str] = None,
) -> ErrorEstimate:
    """Estimate the separation-conditional miss rate of a comparator.

    Draws 2*trials masks (pair k uses positions 2k and 2k+1), orients each
    pair by ground truth, and scores predict on the oriented pair.
    ``separation``/``mode`` default to the comparator's own provenance.
    Deterministic under (dist, seed).
    """
    if ground_truth.n != cmp.n:
        raise InputError(f"ground truth n={ground_truth.n} but comparator n={cmp.n}")
    cfg_mode = cmp.provenance.get("config", {}).get("mode", {})
    if mode is None:
        mode = cfg_mode.get("type", "multiplicative")
    if separation is None:
        separation = cfg_mode.get("alpha") if mode == "multiplicative" else cfg_mode.get("beta")
        if separation is None:
            raise InputError("separation not given and not recoverable from provenance")
    if mode not in ("multiplicative", "additive"):
        raise InputError(f"unknown separation mode {mode!r}")

    rng = np.random.default_rng(seed)
    masks = dist.draw(rng, 2 * trials)
    cache: dict[int, float] = {}

    def value(m: int) -> float:
        v = cache.get(m)
        if v is None:
            v = ground_truth.value(m)
            cache[m] = v
        return v

    miss = 0
    separated = 0
    both_fire = 0
    for k in range(trials):
        a, b = masks[2 * k], masks[2 * k + 1]
        fa, fb = value(a), value(b)
        if fa > fb:
            a, b, fa, fb = b, a, fb, fa
        p_fwd = predict(cmp, a, b)
        p_rev = predict(cmp, b, a)
        if p_fwd and p_rev:
            both_fire += 1
        if values_close(fa, fb):
            continue
        is_sep = (separation * fa <= fb) if mode == "multiplicative" else (fa + separation <= fb)
        if is_sep:
            separated += 1
            if p_fwd == 0:
                miss += 1
    vacuous = separated == 0
    cond = float("nan") if vacuous else miss / separated
    return ErrorEstimate(
        trials=trials,
        miss_count=miss,
        separated_count=separated,
        conditional_error=cond,
        vacuous=vacuous,
        both_fire_count=both_fire,
        query_count=int(cmp.provenance.get("query_count", 0)),
    )


# ---------------------------------------------------------------------------
# Sweeps.
# ---------------------------------------------------------------------------

COLUMNS = [
    "class",
    "n",
    "seed",
    "cell_index",
    "epsilon",
    "delta",
    "mode",
    "separation",
    "distribution",
    "m",
    "s2_size",
    "dim",
    "r_pre_prune",
    "r_size",
    "degree_used",
    "trials",
    "separated_count",
    "miss_count",
    "conditional_error",
    "vacuous",
    "both_fire_count",
    "query_count",
    "error",
    "wall_time_s",
]


@dataclass(frozen=True)
class SweepSpec:
    """One experiment grid; every list-valued field multiplies the cells."""

    class_tag: str
    ns: tuple[int, ...]
    epsilon: float
    delta: float
    seeds: tuple[int, ...]
    trials: int
    gen_params: dict = field(default_factory=dict)
    distribution: str = "uniform"  # or "product"
    product_p: float = 0.5
    mode: str = "multiplicative"
    beta: float = 0.0
    degree_caps: tuple[Optional[int], ...] = (None,)
    m_override: Optional[int] = None
    s2_sizes: tuple[Optional[int], ...] = (None,)
    adjacent_only: bool = False
    sample_constant: float = 1.0

    @staticmethod
    def from_doc(doc: dict) -> "SweepSpec":
        return SweepSpec(
            class_tag=doc["class"],
            ns=tuple(doc["ns"]),
            epsilon=doc["epsilon"],
            delta=doc["delta"],
            seeds=tuple(doc["seeds"]),
            trials=doc["trials"],
            gen_params=doc.get("gen_params", {}),
            distribution=doc.get("distribution", "uniform"),
            product_p=doc.get("product_p", 0.5),
            mode=doc.get("mode", "multiplicative"),
            beta=doc.get("beta", 0.0),
            degree_caps=tuple(doc.get("degree_caps", [None])),
            m_override=doc.get("m_override"),
            s2_sizes=tuple(doc.get("s2_sizes", [None])),
            adjacent_only=doc.get("adjacent_only", False),
            sample_constant=doc.get("sample_constant", 1.0),
        )


def _make_target(spec: SweepSpec, n: int, seed: int) -> SetFunction:
    g = spec.gen_params
    tag = spec.class_tag
    if tag in ("submodular", "coverage-or") or tag == "coverage":
        return gen_coverage(
            n,
            g.get("universe_size", 40),
            g.get("density", 0.2),
            seed,
            unit_weights=g.get("unit_weights", False),
            normalize=g.get("normalize", False),
        )
    if tag == "modular":
        return gen_modular(n, seed, integer_weights=g.get("integer_weights", True))
    if tag == "xos":
        return gen_xos(n, g.get("trees", 4), seed)
    if tag == "fourier":
        return gen_cut(n, g.get("edge_prob", 0.5), seed, unit_weights=True)
    if tag == "interaction":
        return gen_interaction(
            n, g.get("k", 2), g.get("num_terms", max(2, n)), seed
        )
    raise InputError(f"sweep cannot generate targets for class {tag!r}")


def _cell_dist(spec: SweepSpec, n: int):
    if spec.distribution == "uniform":
        return UniformSubsets(n)
    if spec.distribution == "product":
        return ProductSubsets(n, spec.product_p)
    raise InputError(f"unknown distribution {spec.distribution!r}")


def run_cell(spec: SweepSpec, n: int, s2: Optional[int], cap: Optional[int], seed: int, cell_index: int) -> dict:
    """Generate, train and evaluate one sweep cell; never raises on capacity."""
    row = {c: "" for c in COLUMNS}
    row.update(
        {
            "class": spec.class_tag,
            "n": n,
            "seed": seed,
            "cell_index": cell_index,
            "epsilon": spec.epsilon,
            "delta": spec.delta,
            "mode": spec.mode,
            "distribution": spec.distribution
            if spec.distribution == "uniform"
            else f"product({spec.product_p})",
            "trials": spec.trials,
            "error": "",
        }
    )
    t0 = time.perf_counter()
    try:
        streams = np.random.SeedSequence(entropy=(seed, cell_index)).spawn(3)
        gen_seed, train_seed, eval_seed = (int(s.generate_state(1)[0]) for s in streams)
        target = _make_target(spec, n, gen_seed)
        dist = _cell_dist(spec, n)
        oracle = ComparisonOracle(target)
        if spec.mode == "additive":
            config = TrainConfig(
                epsilon=spec.epsilon,
                delta=spec.delta,
                mode=Additive(spec.beta, cap),
                landmark_count_override=spec.m_override,
                train_set_size_override=s2,
                sample_constant=spec.sample_constant,
                adjacent_only=spec.adjacent_only,
            )
            cmp = train_additive(oracle, config, dist, train_seed)
            separation = spec.beta
        else:
            map_tag = "submodular" if spec.class_tag == "coverage" else spec.class_tag
            map_params = dict(spec.gen_params.get("map", {}))
            if map_tag == "fourier" and not ({"support", "degree"} & map_params.keys()):
                map_params["support"] = pair_support(n)
            if map_tag == "interaction":
                map_params.setdefault("k", spec.gen_params.get("k", 2))
            if map_tag == "coverage-or":
                map_params.setdefault("sep_eps", spec.epsilon)
            fmap, alpha = select_map(map_tag, n, **map_params)
            config = TrainConfig(
                epsilon=spec.epsilon,
                delta=spec.delta,
                mode=Multiplicative(alpha),
                landmark_count_override=spec.m_override,
                train_set_size_override=s2,
                sample_constant=spec.sample_constant,
                adjacent_only=spec.adjacent_only,
            )
            cmp = train_multiplicative(oracle, fmap, config, dist, train_seed)
            separation = alpha
        est = measure_error(cmp, target, dist, spec.trials, eval_seed)
        row.update(
            {
                "separation": separation,
                "m": cmp.provenance["m"],
                "s2_size": cmp.provenance["s2_size"],
                "dim": cmp.provenance["dim"],
                "r_pre_prune": cmp.provenance["r_pre_prune"],
                "r_size": cmp.provenance["r_size"],
                "degree_used": cmp.provenance.get("degree_used", ""),
                "separated_count": est.separated_count,
                "miss_count": est.miss_count,
                "conditional_error": est.conditional_error,
                "vacuous": est.vacuous,
                "both_fire_count": est.both_fire_count,
                "query_count": est.query_count,
            }
        )
    except SetcmpError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["wall_time_s"] = round(time.perf_counter() - t0, 3)
    return row


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """All cells of the grid, one row per (n, s2, degree cap, seed)."""
    cells = []
    cell_index = 0
    for n in spec.ns:
        for s2 in spec.s2_sizes:
            for cap in spec.degree_caps:
                for seed in spec.seeds:
                    cells.append((n, s2, cap, seed, cell_index))
                    cell_index += 1
    if jobs <= 1:
        return [run_cell(spec, *cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        rows = list(pool.map(lambda c: run_cell(spec, *c), cells))
    return rows


def _format_value(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    """Fixed column order (see COLUMNS); one line per cell."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_format_value(row.get(c, "")) for c in COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: list[dict]) -> str:
    def clean(row):
        return {
            c: (None if isinstance(row.get(c), float) and math.isnan(row[c]) else row.get(c))
            for c in COLUMNS
        }

    return json.dumps([clean(r) for r in rows], sort_keys=True, indent=2)
