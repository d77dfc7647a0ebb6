"""setcmp: learn combinatorial set functions up to pairwise comparisons.

The learner only ever sees answers to "is f(S) <= f(S')?". Training sorts
a landmark sample, fits one linear separator per landmark pair over a
class-appropriate feature map, keeps the minimal accepted pairs, and
predicts by searching for a separator that strictly sandwiches the two
query sets. Membership-query learners for boolean and small-range targets
live in ``querylearn``; error estimation and sweeps in ``harness``.
"""

from .comparator import (
    Additive,
    Comparator,
    Multiplicative,
    TrainConfig,
    predict,
    prune_minimal,
    train_additive,
    train_multiplicative,
)
from .distributions import FixedSequence, ProductSubsets, UniformSubsets
from .errors import CapacityError, InputError, InvariantError, SetcmpError
from .featmap import (
    FeatureMap,
    characteristic_map,
    embed,
    embed_many,
    intersect_map,
    monomial_map,
    or_map,
    pair_support,
    parity_map,
    select_map,
)
from .harness import ErrorEstimate, SweepSpec, measure_error, run_sweep
from .oracle import ComparisonOracle, locate, oracle_sort
from .querylearn import (
    BucketPredictor,
    bucket_predict,
    learn_buckets,
    learn_buckets_approx,
    learn_disjunction,
    max_bucket_index,
)
from .septrain import (
    LinearSeparator,
    classify,
    count_errors,
    train_realizable,
    train_tolerant,
)
from .setfn import (
    Coverage,
    CurvatureShift,
    Disjunction,
    FourierSparse,
    GraphCut,
    Interaction,
    KDnf,
    SetFunction,
    Truncate,
    Xos,
    evaluate,
    fourier_from_cut,
    gen_coverage,
    gen_curvature_shift,
    gen_cut,
    gen_disjunction,
    gen_interaction,
    gen_kdnf,
    gen_modular,
    gen_xos,
    path_cut,
    value_table,
    verify_class,
)

__version__ = "0.1.0"
