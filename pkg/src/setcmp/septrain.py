"""Linear separator training for landmark pairs.

Two paths:

* ``train_realizable`` decides strict separability exactly via an LP
  feasibility program with margin-1 normalization (negatives at w.x <=
  theta-1, positives at w.x >= theta+1). The returned threshold is then
  recentered to the midpoint of the empirical score gap, which keeps it
  valid, puts it where unseen in-between points split evenly, and does not
  depend on which vertex the solver happened to report. A perceptron would
  need an a-priori margin bound to terminate; the LP gives a definite
  feasible/infeasible verdict.

* ``train_tolerant`` first tries the realizable path; on infeasibility it
  minimizes total hinge loss (also an LP, so runs replay exactly), then
  sweeps the threshold over midpoints of the sorted projections and
  reports the honest 0-1 error of what it returns. The caller makes any
  acceptance decision; the reported error is never the surrogate value.

Labels are boolean arrays: True = positive (value at or above the upper
landmark), False = negative (value strictly below the lower landmark).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .errors import InputError, InvariantError

#: classify() outcomes
NEGATIVE, ON_THRESHOLD, POSITIVE = -1, 0, 1

_FEAS_TOL = 1e-7
_THRESH_REL_TOL = 1e-9


@dataclass(frozen=True)
class LinearSeparator:
    w: np.ndarray
    theta: float
    vacuous: bool = field(default=False, kw_only=True)

    def score(self, x: np.ndarray) -> float:
        return float(np.dot(self.w, x))


def classify(sep: LinearSeparator, x: np.ndarray) -> int:
    """Strict side of the threshold; ON_THRESHOLD within relative tolerance."""
    if len(x) != len(sep.w):
        raise InputError(f"feature dimension {len(x)} != separator dimension {len(sep.w)}")
    s = sep.score(x)
    if abs(s - sep.theta) <= _THRESH_REL_TOL * (1.0 + abs(sep.theta)):
        return ON_THRESHOLD
    return POSITIVE if s > sep.theta else NEGATIVE


def _basis_separator(d: int, theta: float, vacuous: bool = False) -> LinearSeparator:
    w = np.zeros(d)
    w[0] = 1.0
    return LinearSeparator(w, theta, vacuous=vacuous)


def train_realizable(X: np.ndarray, y: np.ndarray) -> LinearSeparator | None:
    """Zero-training-error separator if one exists, else None.

    Degenerate inputs are feasible by definition: an empty sample yields an
    all-positive separator flagged vacuous; a single-class sample yields a
    first-coordinate threshold putting everything on the class's side.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=bool)
    if X.ndim != 2 or X.shape[1] < 1:
        raise InputError("training features must be a (samples, d>=1) matrix")
    n, d = X.shape
    if n == 0:
        return _basis_separator(d, -2.0, vacuous=True)
    if y.all():
        return _basis_separator(d, float(X[:, 0].min()) - 2.0)
    if not y.any():
        return _basis_separator(d, float(X[:, 0].max()) + 2.0)

    # Variables: [w (d), theta]; negatives at w.x - theta <= -1, positives
    # at -(w.x - theta) <= -1.
    sign = np.where(y, -1.0, 1.0)
    a_ub = np.hstack([sign[:, None] * X, -sign[:, None]])
    res = linprog(
        np.zeros(d + 1),
        A_ub=a_ub,
        b_ub=-np.ones(n),
        bounds=[(None, None)] * (d + 1),
        method="highs",
    )
    if res.status == 2:
        return None
    if res.status != 0:
        raise InvariantError(f"separability LP ended with status {res.status}: {res.message}")
    w = np.array(res.x[:d])
    theta = float(res.x[d])
    scores = X @ w
    worst = max(
        float(np.max(scores[~y] - (theta - 1.0), initial=0.0)),
        float(np.max((theta + 1.0) - scores[y], initial=0.0)),
    )
    if worst > 10 * _FEAS_TOL:
        raise InvariantError(f"LP reported feasible but constraints violated by {worst:.2e}")
    # Midpoint of the empirical gap; preserves every margin-1 constraint
    # because min positive - max negative >= 2 at any feasible point.
    theta = (float(scores[~y].max()) + float(scores[y].min())) / 2.0
    return LinearSeparator(w, theta)


def count_errors(sep: LinearSeparator, X: np.ndarray, y: np.ndarray) -> int:
    """Strict 0-1 recount through classify; on-threshold counts as an error."""
    errs = 0
    for row, label in zip(np.asarray(X, dtype=np.float64), np.asarray(y, dtype=bool)):
        side = classify(sep, row)
        errs += side != (POSITIVE if label else NEGATIVE)
    return errs


def _hinge_direction(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """w minimizing total hinge loss sum max(0, 1 - y(w.x - theta)); LP form."""
    n, d = X.shape
    sign = np.where(y, 1.0, -1.0)
    dense = np.hstack([-sign[:, None] * X, sign[:, None]])
    a_ub = sparse.hstack([sparse.csr_matrix(dense), -sparse.eye(n)], format="csr")
    b_ub = -np.ones(n)
    c = np.concatenate([np.zeros(d + 1), np.ones(n)])
    bounds = [(None, None)] * (d + 1) + [(0, None)] * n
    # Interior point is ~3x faster here; fall back to simplex on any
    # numerical trouble so the answer stays deterministic.
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs-ipm")
    if res.status != 0:
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise InvariantError(f"hinge LP ended with status {res.status}: {res.message}")
    w = np.array(res.x[:d])
    if np.max(np.abs(w)) < 1e-12:
        w = np.zeros(d)
        w[0] = 1.0
    return w


def _best_threshold(p: np.ndarray, y: np.ndarray) -> float:
    """Threshold minimizing 0-1 error for fixed projections p; deterministic.

    Candidates are midpoints between consecutive distinct sorted values
    plus sentinels beyond each end; ties in error resolve toward the
    smallest threshold.
    """
    order = np.argsort(p, kind="stable")
    ps = p[order]
    ys = y[order]
    n = len(ps)
    pos_prefix = np.concatenate([[0], np.cumsum(ys)])  # positives among first k
    total_pos = pos_prefix[-1]
    # errors when cutting after k samples: positives below + negatives above
    cut_errors = pos_prefix + ((n - total_pos) - (np.arange(n + 1) - pos_prefix))
    valid = np.ones(n + 1, dtype=bool)
    valid[1:n] = ps[1:] > ps[:-1]  # only cut between distinct values
    best_k = -1
    best_err = n + 1
    for k in range(n + 1):
        if valid[k] and cut_errors[k] < best_err:
            best_err = cut_errors[k]
            best_k = k
    if best_k == 0:
        return float(ps[0]) - 1.0
    if best_k == n:
        return float(ps[-1]) + 1.0
    return float(ps[best_k - 1] + ps[best_k]) / 2.0


def train_tolerant(
    X: np.ndarray, y: np.ndarray, tolerance: float = 0.0
) -> tuple[LinearSeparator, float]:
    """Best-effort separator plus its exact empirical 0-1 error.

    ``tolerance`` is the acceptance level the caller will apply; it does not
    change the optimization. Worst case returns a high-error separator with
    its honest error.
    """
    if not (0.0 <= tolerance < 1.0):
        raise InputError("tolerance must lie in [0,1)")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=bool)
    exact = train_realizable(X, y)
    if exact is not None:
        return exact, 0.0
    w = _hinge_direction(X, y)
    # Sweep both orientations of the surrogate direction; ties prefer the
    # unflipped one so runs replay exactly.
    best: tuple[LinearSeparator, int] | None = None
    for cand_w in (w, -w):
        sep = LinearSeparator(cand_w, _best_threshold(X @ cand_w, y))
        errs = count_errors(sep, X, y)
        if best is None or errs < best[1]:
            best = (sep, errs)
    return best[0], best[1] / len(y)
