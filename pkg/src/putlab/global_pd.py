"""Closed-form brackets on privacy-distortion functions over ``{1..m}^n``.

The lower bounds are driven by two numbers extracted from the source set:
``theta`` (``m^n`` times the best worst-case probability) and ``eta`` (the
largest probability of the prior achieving it).  Upper bounds are the losses
of the distance-exponential mechanism ``Q_D``.  When the hull of the source
set contains the uniform prior, ``theta = 1`` and several brackets close.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from putlab.bounds import BoundPair, clamp_log
from putlab.catalog import wang_log_weights
from putlab.core import ContractError, NotionKind, PrivacyNotion, ProductSpace, SourceClass, SourceKind, SourceSet

__all__ = ["BoundPair", "global_bounds", "theta_bounds", "wang_max_info", "zero_threshold"]

_BLOCK = 1024


def zero_threshold(m: int, n: int) -> float:
    """Distortion from which the uniform mechanism is valid and every loss is zero."""
    return n * (m - 1) / m


def wang_max_info(S: SourceSet, space: ProductSpace, D: float) -> float:
    """Worst-case maximal information of ``Q_D`` over the hull of ``S``.

    The loss is ``-log`` of the smallest ``sum_x P(x) A^(-d(x, y))``; that
    sum is linear in ``P``, so the minimum over the hull sits at a member (or
    at a point mass for the full simplex).
    """
    log_w = wang_log_weights(space, D)
    log_w = log_w - log_w[0]  # drop the common factor (1 - D/n)^n
    if S.kind is SourceKind.FULL_SIMPLEX:
        return max(0.0, -float(log_w[-1]))
    V = S.member_matrix()
    w = np.exp(log_w)
    lowest = math.inf
    for lo in range(0, space.size, _BLOCK):
        hi = min(space.size, lo + _BLOCK)
        K = w[space.distances(np.arange(lo, hi))]  # symmetric: rows index y
        lowest = min(lowest, float((V @ K.T).min()))
    return max(0.0, -math.log(lowest))


def _log_wang_a(m, n, D):
    return math.log(m - 1) + math.log(n - D) - math.log(D)


def theta_bounds(notion: PrivacyNotion, m: int, n: int, D: float, theta: float, eta: float,
                 max_info_upper: float | None = None) -> tuple[float, float, str]:
    """The general ``theta``-parameterised bracket, without zero-region handling.

    Returns ``(lower, upper, note)``.  ``max_info_upper`` supplies the upper
    bound for maximal information, which depends on the whole source set.
    """
    kind = notion.kind
    log_a = _log_wang_a(m, n, D)
    note = ""
    if kind is NotionKind.DP:
        lower = clamp_log((m - 1) * (theta * n - D) / D)
        upper = max(0.0, log_a)
    elif kind is NotionKind.APPROX_DP:
        delta = notion.delta
        arg = (m - 1) * (theta * n * (1 - delta * m ** (n - 1)) - D) / D
        lower = clamp_log(arg)
        if arg <= 1:
            note = "vacuous lower bound"
        log_b = n * math.log1p(-D / n)
        upper = clamp_log(math.exp(log_a) * (1 - delta * math.exp(-log_b)))
    elif kind in (NotionKind.MAX_INFO, NotionKind.MAX_LEAKAGE):
        lower = clamp_log(m * (1 - D / (theta * n)))
        if kind is NotionKind.MAX_LEAKAGE:
            upper = max(0.0, n * math.log(m * (1 - D / n)))
        else:
            if max_info_upper is None:
                raise ValueError("maximal information upper bound needs the source set")
            upper = max_info_upper
    elif kind is NotionKind.RENYI_DP:
        alpha = notion.alpha
        r = D / theta
        if n - r > 0:
            lower = max(0.0, math.log(m - 1) + alpha / (alpha - 1) * math.log(n - r) - math.log(r)
                        - (math.log(n) + (n - 1) * math.log(m)) / (alpha - 1))
        else:
            lower = 0.0
        terms = [alpha * log_a, (1 - alpha) * log_a]
        if m > 2:
            terms.append(math.log(m - 2))
        upper = max(0.0, (math.log(D / (n * (m - 1))) + float(logsumexp(terms))) / (alpha - 1))
    elif kind is NotionKind.SIBSON:
        alpha = notion.alpha
        spread = 0.5 * (1 - theta) * (n + 1) * m + theta
        lower = max(0.0, (alpha - n) / (alpha - 1) * math.log(m)
                    + alpha / (alpha - 1) * (math.log1p(-D / n) - math.log(spread)))
        inner = np.logaddexp(alpha * math.log(n - D), alpha * math.log(D) + (1 - alpha) * math.log(m - 1))
        upper = max(0.0, n * math.log(m) + n * float(inner) / (alpha - 1)
                    - alpha / (alpha - 1) * n * math.log(n))
    else:
        if n * theta > D:
            lower = max(0.0, theta * n * (-math.log(eta) / n + math.log1p(-D / (n * theta)))
                        + theta * D * math.log(D / ((m - 1) * (n * theta - D))))
        else:
            lower = 0.0
        upper = max(0.0, n * math.log(m * (1 - D / n)) + D * math.log(D / ((m - 1) * (n - D))))
    return lower, upper, note


def global_bounds(notion: PrivacyNotion, S: SourceSet, space: ProductSpace, D: float) -> BoundPair:
    """Bracket the global privacy-distortion function at distortion ``D``.

    Args:
        notion: privacy notion.
        S: source set over ``space``.
        space: the product space ``{1..m}^n``.
        D: distortion level in ``(0, n]``.

    Returns:
        A :class:`BoundPair`.  DP and mutual information are exact when the
        hull of ``S`` contains the uniform prior.
    """
    if S.space != space:
        raise ContractError("source set lives on a different space")
    m, n = space.m, space.n
    if not 0 < D <= n:
        raise ValueError(f"distortion must lie in (0, {n}], got {D}")
    if D >= zero_threshold(m, n):
        return BoundPair.zero()
    class1 = S.source_class is SourceClass.CLASS_I
    if class1:
        theta, eta = 1.0, float(m) ** (-n)
    else:
        theta, eta = S.theta_star, S.eta
    mi_upper = wang_max_info(S, space, D) if notion.kind is NotionKind.MAX_INFO else None
    lower, upper, note = theta_bounds(notion, m, n, D, theta, eta, mi_upper)
    if class1:
        kind = notion.kind
        if kind in (NotionKind.DP, NotionKind.MUTUAL_INFO):
            return BoundPair.point(upper, note)
        if n == 1 and kind in (NotionKind.APPROX_DP, NotionKind.MAX_LEAKAGE):
            return BoundPair.point(upper, note)
        if kind is NotionKind.SIBSON:
            mi, _, _ = theta_bounds(PrivacyNotion.mutual_info(), m, n, D, 1.0, eta)
            lower = max(lower, mi)
    exact = lower == 0.0 and upper == 0.0
    return BoundPair(lower, upper, exact, note)
