"""Command-line surface: gen / train / predict / eval / sweep / querylearn.

Every verb that draws randomness requires an explicit --seed; there is no
implicit entropy. Exit codes: 0 success, 2 input error, 3 capacity error,
4 internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import comparator as cmpmod
from . import querylearn as qlmod
from . import setfn
from .bitset import mask_from
from .distributions import ProductSubsets, UniformSubsets
from .errors import CapacityError, InputError, InvariantError, SetcmpError
from .featmap import pair_support, select_map
from .harness import SweepSpec, measure_error, rows_to_csv, rows_to_json, run_sweep
from .oracle import ComparisonOracle
from .querylearn import learn_buckets, learn_buckets_approx, learn_disjunction

GEN_CLASSES = (
    "coverage",
    "xos",
    "modular",
    "cut",
    "fourier",
    "interaction",
    "disjunction",
    "kdnf",
    "curvature",
    "truncate",
)

TRAIN_CLASSES = (
    "modular",
    "submodular",
    "xos",
    "subadditive",
    "curvature",
    "xos-trees",
    "interaction",
    "fourier",
    "coverage-or",
    "submodular-additive",
)


def _parse_subset(text: str) -> int:
    """Comma-separated 0-based element indices; empty string is the empty set."""
    text = text.strip()
    if not text:
        return 0
    try:
        return mask_from(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise InputError(f"cannot parse subset {text!r}: {exc}") from exc


def _load_fn(path: str) -> setfn.SetFunction:
    try:
        return setfn.from_json(Path(path).read_text())
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise InputError(f"cannot load function file {path}: {exc}") from exc


def _load_comparator(path: str) -> cmpmod.Comparator:
    try:
        return cmpmod.from_json(Path(path).read_text())
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise InputError(f"cannot load comparator file {path}: {exc}") from exc


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _dist_from_args(args, n: int):
    if args.dist == "uniform":
        return UniformSubsets(n)
    return ProductSubsets(n, args.p)


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _cmd_gen(args) -> int:
    need_seed = args.klass not in ("curvature", "truncate") and not (
        args.klass == "cut" and args.graph
    ) and not (args.klass == "fourier" and args.from_cut)
    if need_seed and args.seed is None:
        raise InputError(f"gen {args.klass} draws randomness; --seed is required")

    if args.klass == "coverage":
        fn = setfn.gen_coverage(
            args.n,
            args.universe,
            args.density,
            args.seed,
            unit_weights=args.unit_weights,
            normalize=args.normalize,
        )
    elif args.klass == "xos":
        fn = setfn.gen_xos(args.n, args.trees, args.seed)
    elif args.klass == "modular":
        fn = setfn.gen_modular(args.n, args.seed)
    elif args.klass == "cut":
        if args.graph:
            if not args.graph.startswith("path"):
                raise InputError(f"unknown canned graph {args.graph!r}; supported: pathK")
            k = int(args.graph[4:])
            fn = setfn.path_cut(k)
        else:
            fn = setfn.gen_cut(args.n, args.edge_prob, args.seed)
    elif args.klass == "fourier":
        if not args.from_cut:
            raise InputError("gen fourier requires --from-cut CUTFILE")
        base = _load_fn(args.from_cut)
        if base.kind != "cut":
            raise InputError(f"--from-cut expects a cut function, got kind {base.kind!r}")
        fn = setfn.fourier_from_cut(base)
    elif args.klass == "interaction":
        fn = setfn.gen_interaction(args.n, args.k, args.terms, args.seed)
    elif args.klass == "disjunction":
        fn = setfn.gen_disjunction(args.n, args.seed)
    elif args.klass == "kdnf":
        fn = setfn.gen_kdnf(args.n, args.k, args.terms, args.seed)
    elif args.klass == "curvature":
        fn = setfn.gen_curvature_shift(_load_fn(args.base), args.kappa)
    else:  # truncate
        fn = setfn.Truncate(
            _load_fn(args.base).n, cap=args.cap, base=_load_fn(args.base)
        )

    _write(args.out, setfn.to_json(fn))
    print(f"wrote {fn.kind} function on n={fn.n} to {args.out}")
    if fn.n <= 12:
        for prop in ("monotone", "submodular"):
            res = setfn.verify_class(fn, prop)
            state = "verified" if res.ok else f"FAILED (witness {res.witness})"
            print(f"{prop}: {state}")
    else:
        print(f"class checks skipped (n={fn.n} > 12; use sampled verify)")
    return 0


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------


def _train_map(args, fn: setfn.SetFunction):
    tag = args.klass
    n = fn.n
    if tag in ("modular", "submodular", "xos", "subadditive"):
        return select_map(tag, n)
    if tag == "curvature":
        if args.kappa is None:
            raise InputError("--class curvature requires --kappa")
        return select_map(tag, n, kappa=args.kappa)
    if tag == "xos-trees":
        if args.xi is None or args.trees is None:
            raise InputError("--class xos-trees requires --xi and --trees")
        return select_map(tag, n, xi=args.xi, trees=args.trees)
    if tag == "interaction":
        k = args.k if args.k is not None else getattr(fn, "degree", None)
        if k is None:
            raise InputError("--class interaction requires --k")
        return select_map(tag, n, k=k)
    if tag == "fourier":
        if args.support_file:
            doc = json.loads(Path(args.support_file).read_text())
            support = doc["support"] if isinstance(doc, dict) else doc
        elif args.degree is not None:
            return select_map(tag, n, degree=args.degree)
        elif fn.kind == "fourier":
            support = list(fn.support)
        elif fn.kind == "cut":
            support = pair_support(n)
        else:
            raise InputError("--class fourier needs --support-file, --degree, or a fourier/cut target")
        return select_map(tag, n, support=support)
    if tag == "coverage-or":
        sep_eps = args.sep_eps if args.sep_eps is not None else args.eps
        return select_map(tag, n, sep_eps=sep_eps)
    raise InputError(f"no feature map for class {tag!r}")


def _cmd_train(args) -> int:
    fn = _load_fn(args.fn)
    oracle = ComparisonOracle(fn)
    dist = _dist_from_args(args, fn.n)
    if args.klass == "submodular-additive":
        if args.beta is None:
            raise InputError("--class submodular-additive requires --beta")
        config = cmpmod.TrainConfig(
            epsilon=args.eps,
            delta=args.delta,
            mode=cmpmod.Additive(args.beta, args.degree_cap),
            landmark_count_override=args.landmarks,
            train_set_size_override=args.train_size,
            sample_constant=args.c0,
            adjacent_only=args.adjacent_only,
        )
        cmp = cmpmod.train_additive(oracle, config, dist, args.seed)
        prov = cmp.provenance
        print(
            f"additive degree: theory {prov['theory_degree']}, used {prov['degree_used']}"
            f"{' (capped)' if prov['degree_capped'] else ''}"
        )
    else:
        fmap, alpha = _train_map(args, fn)
        config = cmpmod.TrainConfig(
            epsilon=args.eps,
            delta=args.delta,
            mode=cmpmod.Multiplicative(alpha),
            landmark_count_override=args.landmarks,
            train_set_size_override=args.train_size,
            sample_constant=args.c0,
            adjacent_only=args.adjacent_only,
        )
        cmp = cmpmod.train_multiplicative(oracle, fmap, config, dist, args.seed)
        print(f"feature map: {fmap.kind} (dim {fmap.dim}), separation {alpha:.6g}")
    prov = cmp.provenance
    print(
        f"m={prov['m']} |S2|={prov['s2_size']} "
        f"|R|={prov['r_pre_prune']}->{prov['r_size']} query_count={prov['query_count']}"
    )
    _write(args.out, cmpmod.to_json(cmp))
    print(f"wrote comparator to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# predict / eval
# ---------------------------------------------------------------------------


def _cmd_predict(args) -> int:
    cmp = _load_comparator(args.cmp)
    a = _parse_subset(args.a)
    b = _parse_subset(args.b)
    print(cmpmod.predict(cmp, a, b))
    return 0


def _cmd_eval(args) -> int:
    cmp = _load_comparator(args.cmp)
    fn = _load_fn(args.fn)
    if fn.n != cmp.n:
        raise InputError(f"function n={fn.n} does not match comparator n={cmp.n}")
    dist = _dist_from_args(args, fn.n)
    est = measure_error(cmp, fn, dist, args.trials, args.seed)
    cond = "nan (vacuous: no separated pair)" if est.vacuous else f"{est.conditional_error:.6f}"
    sep_frac = est.separated_count / est.trials if est.trials else 0.0
    print(f"conditional_error: {cond}")
    print(f"separated: {est.separated_count}/{est.trials} ({sep_frac:.4f})")
    print(f"both_fire_count: {est.both_fire_count}")
    print(f"query_count (training): {est.query_count}")
    if args.csv:
        header = "trials,miss_count,separated_count,conditional_error,both_fire_count,query_count"
        line = (
            f"{est.trials},{est.miss_count},{est.separated_count},"
            f"{est.conditional_error},{est.both_fire_count},{est.query_count}"
        )
        _write(args.csv, header + "\n" + line + "\n")
    return 0


# ---------------------------------------------------------------------------
# sweep / querylearn
# ---------------------------------------------------------------------------


def _cmd_sweep(args) -> int:
    try:
        doc = json.loads(Path(args.spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot load sweep spec {args.spec}: {exc}") from exc
    spec = SweepSpec.from_doc(doc)
    rows = run_sweep(spec, jobs=args.jobs)
    _write(args.out_csv, rows_to_csv(rows))
    print(f"wrote {len(rows)} rows to {args.out_csv}")
    if args.out_json:
        _write(args.out_json, rows_to_json(rows))
        print(f"wrote JSON results to {args.out_json}")
    failed = [r for r in rows if r["error"]]
    for r in failed:
        print(f"cell {r['cell_index']} failed: {r['error']}", file=sys.stderr)
    return 0


def _cmd_querylearn(args) -> int:
    fn = _load_fn(args.fn)
    oracle = ComparisonOracle(fn)
    if args.mode == "disjunction":
        support = learn_disjunction(oracle, fn.n)
        elems = [i for i in range(fn.n) if (support >> i) & 1]
        print(f"support: {elems} queries: {oracle.query_count}")
        if args.out:
            _write(args.out, json.dumps({"support": support, "n": fn.n}, sort_keys=True))
        return 0
    if args.k is None:
        raise InputError(f"querylearn mode {args.mode} requires --k")
    if args.mode == "buckets":
        pred = learn_buckets(oracle, fn.n, args.k)
    else:
        if args.alpha is None:
            raise InputError("querylearn mode buckets-approx requires --alpha")
        pred = learn_buckets_approx(oracle, fn.n, args.k, args.alpha)
    print(f"buckets: {len(pred.groups)} subsets: {sum(len(g) for g in pred.groups)} "
          f"queries: {pred.query_count}")
    if args.out:
        _write(args.out, qlmod.to_json(pred))
        print(f"wrote bucket predictor to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setcmp",
        description="Learn combinatorial set functions up to pairwise comparisons.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", help="generate a synthetic target function file")
    g.add_argument("klass", choices=GEN_CLASSES, metavar="CLASS")
    g.add_argument("--n", type=int, help="ground-set size")
    g.add_argument("--universe", type=int, default=40, help="coverage universe size")
    g.add_argument("--density", type=float, default=0.2, help="coverage item density")
    g.add_argument("--unit-weights", action="store_true", help="coverage weights all 1")
    g.add_argument("--normalize", action="store_true", help="rescale range into [0,1]")
    g.add_argument("--trees", type=int, default=4, help="xos tree count")
    g.add_argument("--edge-prob", type=float, default=0.5, help="random graph edge probability")
    g.add_argument("--graph", help="canned graph, e.g. path3")
    g.add_argument("--from-cut", help="cut function file to convert to fourier form")
    g.add_argument("--k", type=int, default=2, help="interaction degree / kdnf k")
    g.add_argument("--terms", type=int, default=8, help="number of random terms")
    g.add_argument("--base", help="base function file (curvature, truncate)")
    g.add_argument("--kappa", type=float, help="curvature blend in [0,1]")
    g.add_argument("--cap", type=float, help="truncation cap")
    g.add_argument("--seed", type=int, help="PRNG seed (required for random generators)")
    g.add_argument("--out", required=True, help="output function JSON path")
    g.set_defaults(func=_cmd_gen)

    t = sub.add_parser("train", help="train a comparator from a function file")
    t.add_argument("fn", help="target function JSON")
    t.add_argument("--class", dest="klass", choices=TRAIN_CLASSES, required=True)
    t.add_argument("--eps", type=float, required=True, help="accuracy parameter")
    t.add_argument("--delta", type=float, required=True, help="confidence parameter")
    t.add_argument("--seed", type=int, required=True)
    t.add_argument("--out", required=True, help="output comparator JSON path")
    t.add_argument("--kappa", type=float, help="curvature parameter")
    t.add_argument("--xi", type=float, help="xos-trees exponent")
    t.add_argument("--trees", type=int, help="xos-trees tree count")
    t.add_argument("--k", type=int, help="interaction degree")
    t.add_argument("--degree", type=int, help="fourier parity degree")
    t.add_argument("--support-file", help="JSON file with a parity support list")
    t.add_argument("--sep-eps", type=float, help="coverage-or separation epsilon")
    t.add_argument("--beta", type=float, help="additive separation")
    t.add_argument("--degree-cap", type=int, help="additive parity degree cap")
    t.add_argument("--landmarks", type=int, help="override landmark count m")
    t.add_argument("--train-size", type=int, help="override |S2|")
    t.add_argument("--c0", type=float, default=1.0, help="sample size constant")
    t.add_argument("--adjacent-only", action="store_true", help="train adjacent pairs only")
    t.add_argument("--dist", choices=("uniform", "product"), default="uniform")
    t.add_argument("--p", type=float, default=0.5, help="product inclusion probability")
    t.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="compare two subsets with a trained comparator")
    p.add_argument("cmp", help="comparator JSON")
    p.add_argument("--a", required=True, help="first subset, e.g. 0,2,5 (empty for {})")
    p.add_argument("--b", required=True, help="second subset")
    p.set_defaults(func=_cmd_predict)

    e = sub.add_parser("eval", help="estimate separation-conditional error")
    e.add_argument("cmp", help="comparator JSON")
    e.add_argument("fn", help="ground-truth function JSON")
    e.add_argument("--trials", type=int, required=True)
    e.add_argument("--seed", type=int, required=True)
    e.add_argument("--dist", choices=("uniform", "product"), default="uniform")
    e.add_argument("--p", type=float, default=0.5)
    e.add_argument("--csv", help="also write metrics to this CSV path")
    e.set_defaults(func=_cmd_eval)

    s = sub.add_parser("sweep", help="run an experiment grid from a JSON spec")
    s.add_argument("--spec", required=True, help="sweep spec JSON path")
    s.add_argument("--out-csv", required=True)
    s.add_argument("--out-json")
    s.add_argument("--jobs", type=int, default=1, help="concurrent cells")
    s.set_defaults(func=_cmd_sweep)

    q = sub.add_parser("querylearn", help="membership-query learners")
    q.add_argument("fn", help="target function JSON")
    q.add_argument("--mode", choices=("disjunction", "buckets", "buckets-approx"), required=True)
    q.add_argument("--k", type=int)
    q.add_argument("--alpha", type=int)
    q.add_argument("--out", help="output predictor JSON path")
    q.set_defaults(func=_cmd_querylearn)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return 4
    except SetcmpError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
