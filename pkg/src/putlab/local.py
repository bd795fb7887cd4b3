"""Single-coordinate privacy-distortion functions.

Known-prior routines take the prior sorted non-increasingly
(``P_1 >= ... >= P_m``) and refuse anything else: the closed forms depend on
the order, and silently permuting would break the caller's symbol indexing.
Use :func:`putlab.core.sort_with_permutation` first.

Throughout, ``D^(k)`` denotes the total mass of the ``k`` least likely symbols.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from putlab._search import minimise_over_top_diagonal
from putlab.bounds import BoundPair, clamp_log
from putlab.core import NotionKind, Prior, PrivacyNotion, SourceClass, SourceKind, SourceSet
from putlab.lp import solve_lp


def check_sorted(P) -> np.ndarray:
    """Return the probability vector of a single-coordinate prior, checking its order."""
    if isinstance(P, Prior):
        if P.space.n != 1:
            raise ValueError("local routines need a single-coordinate prior")
        p = P.probs
    else:
        p = Prior.of(np.asarray(P, dtype=float)).probs
    if np.any(np.diff(p) > 0):
        raise ValueError("prior must be sorted non-increasingly; see sort_with_permutation")
    return p


def cumulative_tail(P) -> np.ndarray:
    """``tail[k] = D^(k)`` for ``k = 0..m``, with ``tail[0] = 0`` and ``tail[m] = 1``."""
    p = P.probs if isinstance(P, Prior) else np.asarray(P, dtype=float)
    m = p.size
    # Correctly rounded partial sums so decimal breakpoints such as 0.6 come out exact.
    return np.array([math.fsum(p[m - k:]) if k else 0.0 for k in range(m + 1)])


BREAK_TOL = 1e-12


def _check_distortion(D: float):
    if not 0 < D <= 1:
        raise ValueError(f"local distortion must lie in (0, 1], got {D}")


def adp_known_prior(P, D: float, delta: float) -> float:
    """Optimal approximate-DP loss for a known sorted prior.

    ``delta = 0`` is accepted and gives the pure DP value.
    """
    p = check_sorted(P)
    _check_distortion(D)
    if not 0 <= delta < 1:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    m = p.size
    tail = cumulative_tail(p)
    if D >= (1.0 - delta) * tail[m - 1] - BREAK_TOL:
        return 0.0
    best = math.inf
    for k in range(1, m):
        gap = D - (1.0 - delta) * tail[k - 1]
        if gap > BREAK_TOL:
            best = min(best, math.log((m - k) * (1.0 - D - delta)) - math.log(gap))
    return max(0.0, best)


def dp_known_prior(P, D: float) -> float:
    """Optimal DP loss for a known sorted prior."""
    return adp_known_prior(P, D, 0.0)


def ml_known_prior(P, D: float) -> float:
    """Optimal maximal leakage for a known sorted prior."""
    p = check_sorted(P)
    _check_distortion(D)
    m = p.size
    tail = cumulative_tail(p)
    if D >= tail[m - 1] - BREAK_TOL:
        return 0.0
    k = max(1, int(np.searchsorted(tail, D - BREAK_TOL, side="left")))
    val = m - k - (D - tail[k]) / (tail[k] - tail[k - 1])
    return clamp_log(val)


def _members(S) -> list[np.ndarray]:
    if isinstance(S, Prior):
        return [check_sorted(S)]
    if S.kind is SourceKind.FULL_SIMPLEX:
        raise ValueError("known-prior routines need explicit priors, not the full simplex")
    return [check_sorted(P) for P in S.members]


def ml_distortion_from_leakage(S, eps: float) -> float:
    """Smallest distortion achievable with maximal leakage at most ``eps``.

    For a family this is the largest of the per-member values.
    """
    if eps < 0:
        raise ValueError("leakage must be non-negative")
    worst = 0.0
    budget = math.exp(eps)
    for p in _members(S):
        m = p.size
        k = min(int(math.floor(budget)), m)
        if k >= m:
            continue
        tail = cumulative_tail(p)
        worst = max(worst, tail[m - k] + p[k] * (k - budget))
    return worst


def adp_source_set_class2(S, D: float, delta: float) -> float:
    """Optimal approximate-DP loss when the prior is only known to lie in a sorted family.

    Every member must be sorted with the same (index) order.  For each value
    ``a1`` of the largest diagonal entry, a small LP over one multiplier per
    member plus two shared multipliers gives the best achievable off-diagonal
    budget; the outer search over ``a1`` matches the single-prior sweep.
    """
    _check_distortion(D)
    if not 0 <= delta < 1:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    members = _members(S)
    m = members[0].size
    tails = np.array([cumulative_tail(p) for p in members])
    if D >= (1.0 - delta) * tails[:, m - 1].max() - BREAK_TOL:
        return 0.0
    K = len(members)
    j = np.arange(1, m)
    A_ub = -np.hstack([tails[:, 1:m].T, j[:, None], np.ones((m - 1, 1))])
    b_ub = -j.astype(float)

    def ratio(a1):
        c = np.concatenate([np.full(K, a1 - 1.0 + D), [m * (a1 - delta) - 1.0 + delta, a1 - delta]])
        res = solve_lp(c, A_ub, b_ub)
        if not res.success:
            return math.inf
        return ((m - 1) * (a1 - delta) - res.fun) / (1.0 - a1)

    _, value = minimise_over_top_diagonal(ratio, D)
    return clamp_log(value)


def _require_class1(S: SourceSet, m: int):
    if S.space.n != 1 or S.space.m != m:
        raise ValueError(f"source set must live on a single coordinate with m = {m}")
    if S.source_class is not SourceClass.CLASS_I:
        raise ValueError("closed forms require a source set whose hull contains the uniform prior")


def class1_mutual_info(m: int, D: float) -> float:
    if D >= (m - 1) / m:
        return 0.0
    return max(0.0, math.log(m) + math.log1p(-D) + D * (math.log(D) - math.log((m - 1) * (1 - D))))


def class1_pd(notion: PrivacyNotion, m: int, D: float, S: SourceSet) -> BoundPair:
    """Single-coordinate privacy-distortion function when the hull of ``S`` holds the uniform prior.

    Exact for DP, approximate DP, maximal leakage and mutual information;
    a bracket for the other three notions.
    """
    _require_class1(S, m)
    _check_distortion(D)
    kind = notion.kind
    if kind is NotionKind.APPROX_DP:
        delta = notion.delta
        if D >= (1 - delta) * (m - 1) / m:
            return BoundPair.zero()
        return BoundPair.point(clamp_log((m - 1) * (1 - D - delta) / D))
    if D >= (m - 1) / m:
        return BoundPair.zero()
    if kind is NotionKind.DP:
        return BoundPair.point(clamp_log((m - 1) * (1 - D) / D))
    if kind is NotionKind.MAX_LEAKAGE:
        return BoundPair.point(clamp_log(m * (1 - D)))
    if kind is NotionKind.MUTUAL_INFO:
        return BoundPair.point(class1_mutual_info(m, D))
    if kind is NotionKind.MAX_INFO:
        p_min = S.min_probability
        q = D / (m - 1)
        upper = clamp_log((1 - D) / (p_min * (1 - D - q) + q))
        return BoundPair(clamp_log(m * (1 - D)), upper)
    alpha = notion.alpha
    if kind is NotionKind.RENYI_DP:
        lower = math.log(m - 1) + alpha / (alpha - 1) * math.log1p(-D) - math.log(D)
        log_a = math.log((m - 1) * (1 - D) / D)
        terms = [alpha * log_a, (1 - alpha) * log_a]
        if m > 2:
            terms.append(math.log(m - 2))
        upper = (math.log(D / (m - 1)) + float(logsumexp(terms))) / (alpha - 1)
        return BoundPair(max(0.0, lower), max(0.0, upper))
    # Sibson
    lower = max(class1_mutual_info(m, D), math.log(m) + alpha / (alpha - 1) * math.log1p(-D))
    upper = math.log(m) + np.logaddexp(alpha * math.log1p(-D),
                                       alpha * math.log(D) + (1 - alpha) * math.log(m - 1)) / (alpha - 1)
    return BoundPair(max(0.0, lower), max(0.0, float(upper)))


def known_prior_curve(notions: Sequence[PrivacyNotion], P, grid) -> list[tuple[float, PrivacyNotion, BoundPair]]:
    """Evaluate the exact known-prior curves (DP, approximate DP, maximal leakage) on a grid."""
    rows = []
    for D in grid:
        for notion in notions:
            if notion.kind is NotionKind.DP:
                bp = BoundPair.point(dp_known_prior(P, D))
            elif notion.kind is NotionKind.APPROX_DP:
                bp = BoundPair.point(adp_known_prior(P, D, notion.delta))
            elif notion.kind is NotionKind.MAX_LEAKAGE:
                bp = BoundPair.point(ml_known_prior(P, D))
            else:
                raise ValueError(f"no known-prior closed form for {notion.label}")
            rows.append((float(D), notion, bp))
    return rows
