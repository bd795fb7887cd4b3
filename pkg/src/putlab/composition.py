"""Parallel composition: one local mechanism applied to ``n`` i.i.d. coordinates.

Distortion levels passed to :func:`composed_pd` are totals over all ``n``
coordinates; each coordinate then carries ``D / n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from putlab.bounds import BoundPair
from putlab.catalog import randomized_response
from putlab.core import (Mechanism, NotionKind, Prior, PrivacyNotion, ProductSpace, SizingError,
                         SourceClass, SourceKind, SourceSet, enumeration_cap)
from putlab.global_pd import global_bounds
from putlab.local import adp_known_prior, class1_pd, dp_known_prior, ml_known_prior
from putlab.losses import approx_dp_loss, eval_loss

LAW_TOL = 1e-9

_INVARIANT = {NotionKind.DP, NotionKind.RENYI_DP}


class CompositionLawError(AssertionError):
    """A realized product mechanism disagreed with the composition law."""


@dataclass(frozen=True)
class ProductMechanism:
    """``n`` independent copies of ``base``; ``realized`` is the explicit product when it fits."""

    base: Mechanism
    n: int
    realized: Mechanism | None


def _check_base(base: Mechanism):
    if base.space.n != 1:
        raise ValueError("composition needs a single-coordinate base mechanism")
    if base.size_out != base.space.m:
        raise ValueError("composition needs a square base mechanism")


def compose(base: Mechanism, n: int) -> ProductMechanism:
    """Product of ``n`` copies of ``base``; realization is skipped above the enumeration cap."""
    _check_base(base)
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    m = base.space.m
    if m ** n > enumeration_cap():
        return ProductMechanism(base, n, None)
    rows = np.ones((1, 1))
    for _ in range(n):
        rows = np.kron(rows, base.rows)
    return ProductMechanism(base, n, Mechanism(ProductSpace(m, n), rows))


def realize(base: Mechanism, n: int) -> Mechanism:
    pm = compose(base, n)
    if pm.realized is None:
        raise SizingError(f"{base.space.m}^{n} points exceed the enumeration cap")
    return pm.realized


def composed_loss_law(notion: PrivacyNotion, base: Mechanism, P: Prior | None, n: int,
                      check: bool = True) -> float:
    """Loss of ``base`` applied to ``n`` i.i.d. coordinates.

    DP and Renyi DP are unchanged by the product; the information-type losses
    scale by ``n``.  When the product fits under the cap and ``check`` is set,
    the law is confirmed against a direct evaluation of the realized mechanism.
    Approximate DP has no closed law; see :func:`approx_dp_composition`.
    """
    _check_base(base)
    if notion.kind is NotionKind.APPROX_DP:
        raise ValueError("approximate DP does not compose by a closed law; use approx_dp_composition")
    single = eval_loss(notion, base, P)
    value = single if notion.kind in _INVARIANT else n * single
    if check:
        pm = compose(base, n)
        if pm.realized is not None:
            prior_n = Prior.product(P, n) if notion.prior_required else None
            direct = eval_loss(notion, pm.realized, prior_n)
            if not _close(direct, value):
                raise CompositionLawError(
                    f"{notion.label}: law gives {value}, realized product gives {direct}")
    return value


def _close(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= LAW_TOL * max(1.0, abs(b))


def approx_dp_product_value(base: Mechanism, delta: float, n: int) -> float:
    """Approximate-DP loss of the ``n``-fold product of ``base``.

    Only one coordinate differs between neighbours, and the other ``n - 1``
    factors can jointly be as large as ``Q*^(n-1)`` with ``Q*`` the largest
    entry of ``base``; so the product loss is the single-coordinate loss at
    slack ``delta / Q*^(n-1)``.
    """
    _check_base(base)
    q_star = float(base.rows.max())
    return approx_dp_loss(base, delta * q_star ** (1 - n))


def approx_dp_composition(base: Mechanism, delta: float, n: int) -> BoundPair:
    """Bracket ``eps_{delta m^(n-1)}(base) <= eps_delta(base^n) <= eps_delta(base)``."""
    _check_base(base)
    m = base.space.m
    lower = approx_dp_loss(base, delta * m ** (n - 1))
    upper = approx_dp_loss(base, delta)
    return BoundPair(lower, upper, lower == upper)


def _local_set(S: SourceSet, m: int) -> SourceSet:
    if S.space.n != 1 or S.space.m != m:
        raise ValueError(f"source set must describe one coordinate with m = {m}")
    return S


def composed_pd(notion: PrivacyNotion, m: int, n: int, D: float, S: SourceSet) -> BoundPair:
    """Privacy-distortion function of i.i.d. composed mechanisms at total distortion ``D``.

    Args:
        notion: privacy notion.
        m: alphabet size of each coordinate.
        n: number of coordinates.
        D: total distortion in ``(0, n]``.
        S: single-coordinate source set for each coordinate's prior.

    Returns:
        A :class:`BoundPair`.  Approximate DP is always a bracket.
    """
    S = _local_set(S, m)
    if not 0 < D <= n:
        raise ValueError(f"total distortion must lie in (0, {n}], got {D}")
    d = D / n
    kind = notion.kind
    class1 = S.source_class is SourceClass.CLASS_I
    scale = 1.0 if kind in _INVARIANT else float(n)

    if kind is NotionKind.APPROX_DP:
        return _composed_adp(notion.delta, m, n, D, S, class1)
    if class1:
        local = class1_pd(notion, m, d, S)
        return local.scaled(scale)
    known = S.kind is SourceKind.SINGLETON
    if known and kind is NotionKind.DP:
        return BoundPair.point(dp_known_prior(S.members[0], d))
    if known and kind is NotionKind.MAX_LEAKAGE:
        return BoundPair.point(n * ml_known_prior(S.members[0], d))
    local = global_bounds(notion, S, S.space, d)
    return local.scaled(scale)


def _composed_adp(delta, m, n, D, S, class1) -> BoundPair:
    d = D / n
    inflated = delta * m ** (n - 1)

    def local_value(slack):
        if slack >= 1:
            return 0.0
        if class1:
            return class1_pd(PrivacyNotion.approx_dp(slack), m, d, S).upper
        if S.kind is SourceKind.SINGLETON:
            return adp_known_prior(S.members[0], d, slack)
        return None

    lower = local_value(inflated)
    upper = local_value(delta)
    if upper is None:
        upper = global_bounds(PrivacyNotion.approx_dp(delta), S, S.space, d).upper
        lower = 0.0 if inflated >= 1 else global_bounds(
            PrivacyNotion.approx_dp(inflated), S, S.space, d).lower
    # n independent copies of randomized response at distortion D/n also qualify.
    if d < (m - 1) / m:
        upper = min(upper, approx_dp_product_value(randomized_response(m, 1.0 - d), delta, n))
    else:
        upper = 0.0
    exact = lower == upper
    return BoundPair(lower, upper, exact, "product sandwich")
