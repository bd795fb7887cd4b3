"""Named mechanisms and the optimal single-coordinate constructions."""

from __future__ import annotations

import math
import warnings

import numpy as np

from putlab._search import minimise_over_top_diagonal
from putlab.core import Mechanism, Prior, ProductSpace
from putlab.local import BREAK_TOL, check_sorted, cumulative_tail
from putlab.lp import solve_lp


def uniform_mechanism(space: ProductSpace) -> Mechanism:
    return Mechanism(space, np.full((space.size, space.size), 1.0 / space.size))


def identity_mechanism(space: ProductSpace) -> Mechanism:
    return Mechanism(space, np.eye(space.size))


def wang_log_weights(space: ProductSpace, D: float) -> np.ndarray:
    """``log Q_D(y|x)`` as a function of the distance ``l = d(x, y)``, for ``l = 0..n``."""
    m, n = space.m, space.n
    l = np.arange(n + 1)
    if D == n:
        out = np.full(n + 1, -np.inf)
        out[n] = -n * math.log(m - 1)
        return out
    log_b = n * math.log1p(-D / n)
    log_a = math.log(m - 1) + math.log(n - D) - math.log(D)
    return log_b - l * log_a


def wang_mechanism(space: ProductSpace, D: float) -> Mechanism:
    """Distance-exponential mechanism with expected distortion exactly ``D``.

    ``Q_D(y|x) = (1 - D/n)^n * ((m-1)(n-D)/D)^(-d(x,y))``; it coincides with
    ``n`` independent copies of randomized response at per-coordinate
    distortion ``D/n``.  Levels above ``n(m-1)/m`` are allowed with a warning
    because the uniform mechanism then does strictly better.
    """
    m, n = space.m, space.n
    if not 0 < D <= n:
        raise ValueError(f"distortion must lie in (0, n], got {D}")
    if D > n * (m - 1) / m + 1e-12:
        warnings.warn(f"D = {D} exceeds n(m-1)/m; the uniform mechanism dominates", UserWarning,
                      stacklevel=2)
    weights = np.exp(wang_log_weights(space, D))
    return Mechanism(space, weights[space.distances()])


def randomized_response(m: int, keep: float) -> Mechanism:
    """Keep the input with probability ``keep``, otherwise report another symbol uniformly."""
    if not 0 <= keep <= 1:
        raise ValueError("keep probability must lie in [0, 1]")
    Q = np.full((m, m), (1.0 - keep) / (m - 1))
    np.fill_diagonal(Q, keep)
    return Mechanism(ProductSpace(m, 1), Q)


def q_delta_mechanism(m: int, delta: float) -> Mechanism:
    """Mechanism mapping every symbol to symbol 1 except for a ``delta`` chance of staying put.

    It has zero approximate-DP loss at slack ``delta``.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    Q = np.zeros((m, m))
    Q[0, 0] = 1.0
    Q[1:, 0] = 1.0 - delta
    Q[np.arange(1, m), np.arange(1, m)] = delta
    return Mechanism(ProductSpace(m, 1), Q)


def _ordered_alpha_constraints(m: int):
    """Rows ``alpha_{j+1} - alpha_j <= 0`` for ``j = 1..m-1``."""
    A = np.zeros((m - 1, m))
    idx = np.arange(m - 1)
    A[idx, idx] = -1.0
    A[idx, idx + 1] = 1.0
    return A


def _adp_tail_cost(p: np.ndarray, D: float, delta: float, a1: float):
    """Smallest ``sum_{j>=2}(alpha_j - delta)`` with ``alpha_1 = a1`` fixed.

    Returns ``(cost, alphas)`` or ``(inf, None)`` when no diagonal works.
    """
    k = p.size - 1
    A_ub = np.vstack([-p[1:], -np.ones(k), np.eye(k)[:1], _ordered_alpha_constraints(k)])
    b_ub = np.concatenate([[-(1.0 - D - p[0] * a1), -(1.0 - a1 + k * delta), a1], np.zeros(k - 1)])
    # Shift to beta_j = alpha_j - delta so the simplex bound beta >= 0 encodes alpha_j >= delta.
    b_ub = b_ub - A_ub @ np.full(k, delta)
    res = solve_lp(np.ones(k), A_ub, b_ub)
    if not res.success:
        return math.inf, None
    return res.fun, np.concatenate([[a1], res.x + delta])


def optimal_adp_diagonal(P: Prior, D: float, delta: float) -> np.ndarray:
    """Diagonal of an optimal approximate-DP mechanism for a known sorted prior."""
    p = check_sorted(P)
    tail = cumulative_tail(p)
    if not 0 < D < (1.0 - delta) * tail[-2] - BREAK_TOL:
        raise ValueError(f"D must lie in (0, (1-delta) D^(m-1)) = (0, {(1 - delta) * tail[-2]})")

    def ratio(a1):
        cost, _ = _adp_tail_cost(p, D, delta, a1)
        return cost / (1.0 - a1)

    a1, _ = minimise_over_top_diagonal(ratio, D)
    _, alphas = _adp_tail_cost(p, D, delta, a1)
    return alphas


def optimal_adp_mechanism(P: Prior, D: float, delta: float) -> Mechanism:
    """Optimal (epsilon, delta)-DP mechanism for a known prior sorted non-increasingly.

    The diagonal comes from a sweep over the top diagonal entry with an inner
    LP.  Off-diagonal mass in row ``i`` is split in proportion to
    ``alpha_j - delta``, which keeps each row stochastic.
    """
    alphas = optimal_adp_diagonal(P, D, delta)
    m = alphas.size
    w = alphas - delta
    Q = np.empty((m, m))
    for i in range(m):
        others = w.sum() - w[i]
        Q[i] = w * (1.0 - alphas[i]) / others if others > 0 else 0.0
        Q[i, i] = alphas[i]
    return Mechanism(ProductSpace(m, 1), Q)


def optimal_ml_diagonal(P: Prior, D: float) -> np.ndarray:
    p = check_sorted(P)
    m = p.size
    tail = cumulative_tail(p)
    if not 0 < D < tail[-2] - BREAK_TOL:
        raise ValueError(f"D must lie in (0, D^(m-1)) = (0, {tail[-2]})")
    A_ub = np.vstack([-p, -np.ones(m), np.eye(m)[:1], _ordered_alpha_constraints(m)])
    b_ub = np.concatenate([[-(1.0 - D), -1.0, 1.0], np.zeros(m - 1)])
    res = solve_lp(np.ones(m), A_ub, b_ub)
    if not res.success:
        raise RuntimeError(f"maximal-leakage diagonal program failed: {res.status}")
    return np.clip(res.x, 0.0, 1.0)


def optimal_ml_mechanism(P: Prior, D: float) -> Mechanism:
    """Optimal maximal-leakage mechanism for a known prior sorted non-increasingly.

    Row ``i`` keeps ``alpha_i`` on the diagonal and spreads ``1 - alpha_i`` in
    proportion to the other diagonal entries.  Because the diagonal sums to at
    least one, every column maximum sits on the diagonal.
    """
    alphas = optimal_ml_diagonal(P, D)
    m = alphas.size
    Q = np.empty((m, m))
    for i in range(m):
        others = alphas.sum() - alphas[i]
        Q[i] = alphas * (1.0 - alphas[i]) / others if others > 0 else 0.0
        Q[i, i] = alphas[i]
    return Mechanism(ProductSpace(m, 1), Q)
