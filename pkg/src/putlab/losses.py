"""Privacy losses of explicit mechanisms under the seven notions.

All values are in nats.  Divergence-type losses return ``math.inf`` when a
neighbouring input can produce an output that the other input never does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp, xlogy

from putlab.core import ContractError, Mechanism, NotionKind, Prior, PrivacyNotion

SIBSON_MIN_ALPHA = 1.0 + 1e-9
# Excess probability Q(y|x) - delta below this is rounding noise, not a privacy failure.
SLACK_TOL = 1e-12


def _neighbor_pairs(Q: Mechanism):
    rows = Q.rows
    for nb in Q.space.neighbor_maps():
        yield rows, rows[nb]


def _log_ratio_max(num: np.ndarray, den: np.ndarray) -> float:
    pos = num > 0
    if np.any(pos & (den <= 0)):
        return math.inf
    both = pos & (den > 0)
    if not both.any():
        return -math.inf
    return float(np.max(np.log(num[both]) - np.log(den[both])))


def dp_loss(Q: Mechanism) -> float:
    best = 0.0
    for a, b in _neighbor_pairs(Q):
        best = max(best, _log_ratio_max(a, b))
        if best == math.inf:
            break
    return best


def approx_dp_loss(Q: Mechanism, delta: float) -> float:
    """Approximate-DP loss for any ``delta >= 0``.

    Values of ``delta`` outside ``(0, 1)`` are accepted here because product
    mechanisms reduce to a single-coordinate evaluation at an inflated slack.
    """
    best = 0.0
    for a, b in _neighbor_pairs(Q):
        excess = a - delta
        if delta > 0:
            excess = np.where(excess > SLACK_TOL, excess, 0.0)
        best = max(best, _log_ratio_max(excess, b))
        if best == math.inf:
            break
    return best


def max_info_loss(Q: Mechanism, P: Prior) -> float:
    marginal = P.probs @ Q.rows
    # Full support makes the marginal positive wherever some row is positive.
    cols = marginal > 0
    peak = Q.rows[:, cols].max(axis=0)
    return max(0.0, float(np.max(np.log(peak) - np.log(marginal[cols]))))


def max_leakage_loss(Q: Mechanism) -> float:
    return max(0.0, float(math.log(Q.rows.max(axis=0).sum())))


def renyi_loss(Q: Mechanism, alpha: float) -> float:
    best = 0.0
    for a, b in _neighbor_pairs(Q):
        pos = a > 0
        if np.any(pos & (b <= 0)):
            return math.inf
        with np.errstate(divide="ignore"):
            terms = np.where(pos, alpha * np.log(np.where(pos, a, 1.0))
                             + (1.0 - alpha) * np.log(np.where(pos, b, 1.0)), -np.inf)
        per_pair = logsumexp(terms, axis=1) / (alpha - 1.0)
        best = max(best, float(per_pair.max()))
    return best


def _sibson_from_probs(rows: np.ndarray, p: np.ndarray, alpha: float) -> float:
    with np.errstate(divide="ignore"):
        logp = np.log(p)[:, None]
        logq = np.log(rows)
    inner = logsumexp(logp + alpha * logq, axis=0)
    inner = inner[np.isfinite(inner)]
    return float(alpha / (alpha - 1.0) * logsumexp(inner / alpha))


def sibson_loss(Q: Mechanism, P: Prior, alpha: float) -> float:
    if alpha < SIBSON_MIN_ALPHA:
        raise ValueError("Sibson MI below alpha = 1 + 1e-9 is ill-conditioned; use mutual information")
    return max(0.0, _sibson_from_probs(Q.rows, P.probs, alpha))


def _mutual_info_from_probs(rows: np.ndarray, p: np.ndarray) -> float:
    joint = p[:, None] * rows
    marginal = joint.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(joint > 0, rows / np.where(marginal > 0, marginal, 1.0)[None, :], 1.0)
    return float(xlogy(joint, ratio).sum())


def mutual_info_loss(Q: Mechanism, P: Prior) -> float:
    return max(0.0, _mutual_info_from_probs(Q.rows, P.probs))


def eval_loss(notion: PrivacyNotion, Q: Mechanism, P: Prior | None = None) -> float:
    """Privacy loss of ``Q`` under ``notion``.

    Args:
        notion: the privacy notion.
        Q: the mechanism.
        P: prior over ``Q``'s input space; required exactly for maximal
            information, Sibson MI and mutual information and ignored otherwise.

    Returns:
        The loss in nats, possibly ``math.inf``.
    """
    kind = notion.kind
    if notion.prior_required:
        if P is None:
            raise ValueError(f"{notion.label} requires a prior")
        if P.space != Q.space:
            raise ContractError("prior and mechanism live on different spaces")
    if kind is NotionKind.DP:
        return dp_loss(Q)
    if kind is NotionKind.APPROX_DP:
        return approx_dp_loss(Q, notion.delta)
    if kind is NotionKind.MAX_INFO:
        return max_info_loss(Q, P)
    if kind is NotionKind.MAX_LEAKAGE:
        return max_leakage_loss(Q)
    if kind is NotionKind.RENYI_DP:
        return renyi_loss(Q, notion.alpha)
    if kind is NotionKind.SIBSON:
        return sibson_loss(Q, P, notion.alpha)
    return mutual_info_loss(Q, P)


@dataclass
class Relation:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class RelationReport:
    relations: list[Relation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations)

    def failures(self) -> list[Relation]:
        return [r for r in self.relations if not r.passed]

    def add(self, name: str, ok: bool, detail: str = ""):
        self.relations.append(Relation(name, bool(ok), detail))


def _non_decreasing(values: Sequence[float], slack: float) -> bool:
    return all(b >= a - slack for a, b in zip(values, values[1:]))


def check_relations(Q: Mechanism, P: Prior, alpha_grid: Sequence[float],
                    deltas: Sequence[float] = (0.01, 0.05, 0.1, 0.3, 0.5),
                    slack: float = 1e-12) -> RelationReport:
    """Check the ordering relations between the seven losses on one mechanism.

    Over ``n`` coordinates, any two inputs are at most ``n`` neighbour steps
    apart, so Sibson MI and maximal leakage are compared against ``n`` times
    the DP loss (which reduces to the DP loss itself when ``n = 1``).
    """
    alpha_grid = [float(a) for a in alpha_grid]
    if any(a <= 1 for a in alpha_grid) or any(b <= a for a, b in zip(alpha_grid, alpha_grid[1:])):
        raise ValueError("alpha grid must be strictly increasing with every alpha > 1")
    report = RelationReport()
    dp = dp_loss(Q)
    group_dp = Q.space.n * dp
    mi = mutual_info_loss(Q, P)

    adp = [approx_dp_loss(Q, d) for d in sorted(deltas)]
    report.add("adp_non_increasing_in_delta", _non_decreasing(adp[::-1], slack), f"{adp}")
    report.add("adp_le_dp", all(v <= dp + slack for v in adp), f"max adp {max(adp)} dp {dp}")

    rdp = [renyi_loss(Q, a) for a in alpha_grid]
    report.add("renyi_non_decreasing_in_alpha", _non_decreasing(rdp, slack), f"{rdp}")
    report.add("renyi_le_dp", all(v <= dp + slack for v in rdp), f"max renyi {max(rdp)} dp {dp}")

    sib = [sibson_loss(Q, P, a) for a in alpha_grid]
    report.add("sibson_non_decreasing_in_alpha", _non_decreasing(sib, slack), f"{sib}")
    report.add("sibson_ge_mi", all(v >= mi - 1e-9 for v in sib), f"min sibson {min(sib)} mi {mi}")
    report.add("sibson_le_group_dp", all(v <= group_dp + slack for v in sib),
               f"max sibson {max(sib)} n*dp {group_dp}")
    ml = max_leakage_loss(Q)
    report.add("sibson_le_ml", all(v <= ml + 1e-9 for v in sib), f"max sibson {max(sib)} ml {ml}")

    if math.isfinite(dp):
        r_inf = renyi_loss(Q, 1e4)
        report.add("renyi_large_alpha_near_dp", abs(r_inf - dp) < 1e-3, f"renyi(1e4) {r_inf} dp {dp}")
    s_one = sibson_loss(Q, P, 1.0 + 1e-6)
    report.add("sibson_near_one_near_mi", abs(s_one - mi) < 1e-3, f"sibson(1+1e-6) {s_one} mi {mi}")
    return report
