"""Brute-force privacy-distortion oracles for single-coordinate problems.

These solvers work directly on the ``m x m`` mechanism matrix and share no
algebra with the closed forms they are used to check:

* DP, approximate DP and maximal information: bisection on ``eps`` with an LP
  feasibility test (every constraint is linear in ``Q`` once ``e^eps`` is fixed).
* Maximal leakage: one LP with auxiliary column-maximum variables.
* Mutual information: Blahut-Arimoto iterations over the distortion slope.
* Sibson MI and Renyi DP: projected gradient descent with random restarts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
import numpy as np

from putlab.core import Mechanism, NotionKind, Prior, PrivacyNotion, ProductSpace
from putlab.losses import _mutual_info_from_probs, eval_loss
from putlab.lp import solve_lp

MAX_M_LP = 6
MAX_M_CONVEX = 4
_CLEAN = 1e-11
_VALID_SLACK = 1e-12


@dataclass(frozen=True)
class OracleResult:
    """Numerical optimum with a mechanism that attains it."""

    value: float
    certificate: Mechanism
    iterations: int
    tolerance_achieved: float
    certified: bool = True
    note: str = ""


def _prior_matrix(P) -> np.ndarray:
    priors = [P] if isinstance(P, Prior) else list(P)
    if not priors:
        raise ValueError("at least one prior is required")
    for Pi in priors:
        if Pi.space.n != 1 or Pi.space != priors[0].space:
            raise ValueError("oracles work on single-coordinate priors over one alphabet")
    return np.vstack([Pi.probs for Pi in priors])


def _clean_certificate(x: np.ndarray, m: int) -> Mechanism:
    Q = np.clip(x.reshape(m, m), 0.0, None)
    Q[Q < _CLEAN] = 0.0
    return Mechanism(ProductSpace(m, 1), Q / Q.sum(axis=1, keepdims=True))


class _Feasibility:
    """Is ``loss(Q) <= eps`` compatible with validity?

    Rather than asking the solver for feasibility, each test maximizes the
    smallest validity margin ``sum_i P_i Q(i|i)`` over the priors subject to
    the loss constraints.  The uniform mechanism always meets those, so the LP
    is feasible and the answer rests on a computed optimum instead of a
    phase-one tolerance.
    """

    def __init__(self, notion: PrivacyNotion, priors: np.ndarray, D: float):
        self.kind = notion.kind
        self.delta = notion.delta if self.kind is NotionKind.APPROX_DP else 0.0
        K, m = priors.shape
        self.m = m
        self.target = 1.0 - D
        nv = m * m
        self.A_eq = np.hstack([np.kron(np.eye(m), np.ones(m)), np.zeros((m, 1))])
        self.b_eq = np.ones(m)
        # t - sum_i P_i Q(i|i) <= 0 for every prior
        margin = np.zeros((K, nv + 1))
        margin[:, np.arange(m) * (m + 1)] = -priors
        margin[:, -1] = 1.0
        self.margin = margin
        self.cost = np.zeros(nv + 1)
        self.cost[-1] = -1.0
        if self.kind in (NotionKind.DP, NotionKind.APPROX_DP):
            j, i, k = np.array([(j, i, k) for j in range(m) for i in range(m) for k in range(m) if i != k]).T
            rows = np.arange(j.size)
            self.num_idx = (rows, i * m + j)
            self.den = np.zeros((j.size, nv + 1))
            self.den[rows, k * m + j] = -1.0
        elif self.kind is NotionKind.MAX_INFO:
            # For each prior: Q(j|i) / e^eps - sum_k P_k Q(j|k) <= 0.
            blocks = []
            nums = []
            for p in priors:
                for i in range(m):
                    for j in range(m):
                        row = np.zeros(nv + 1)
                        row[np.arange(m) * m + j] = -p
                        blocks.append(row)
                        nums.append(i * m + j)
            self.den = np.array(blocks)
            self.num_idx = (np.arange(len(nums)), np.array(nums))
        else:
            raise ValueError(f"no LP feasibility form for {self.kind.value}")

    def solve(self, eps: float):
        """A valid mechanism with loss at most ``eps``, or ``None``."""
        inv = math.exp(-eps)
        A = self.den.copy()
        A[self.num_idx] += inv
        b = np.full(A.shape[0], self.delta * inv)
        res = solve_lp(self.cost, np.vstack([A, self.margin]),
                       np.concatenate([b, np.zeros(self.margin.shape[0])]), self.A_eq, self.b_eq)
        if not res.success:
            raise RuntimeError(f"margin LP failed at eps={eps}: {res.status}")
        if res.x[-1] < self.target - _VALID_SLACK:
            return None
        return res.x[:-1]


def oracle_pd_lp(notion: PrivacyNotion, P, D: float, tol: float = 1e-7) -> OracleResult:
    """Optimal loss over all valid ``m x m`` mechanisms for DP, approximate DP,
    maximal information or maximal leakage.

    ``P`` is a prior or a sequence of priors; with several priors, validity and
    maximal information are required for each of them.
    """
    priors = _prior_matrix(P)
    m = priors.shape[1]
    if m > MAX_M_LP:
        raise ValueError(f"LP oracle limited to m <= {MAX_M_LP}")
    if tol < 1e-8:
        raise ValueError("tolerance below 1e-8 is not supported")
    if not 0 < D <= 1:
        raise ValueError("distortion must lie in (0, 1]")
    if notion.kind is NotionKind.MAX_LEAKAGE:
        return _oracle_ml(priors, D, tol)
    feas = _Feasibility(notion, priors, D)
    x = feas.solve(0.0)
    if x is not None:
        return OracleResult(0.0, _clean_certificate(x, m), 1, 0.0)
    lo = 0.0
    hi = max(math.log((m - 1) * (1 - D) / D), 0.0) + 1.0
    iterations = 1
    x_hi = feas.solve(hi)
    while x_hi is None:
        if hi > 200:
            raise RuntimeError(f"bisection could not find a feasible bracket: [{lo}, {hi}]")
        lo, hi = hi, 2 * hi
        x_hi = feas.solve(hi)
        iterations += 1
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        x = feas.solve(mid)
        iterations += 1
        if x is None:
            lo = mid
        else:
            hi, x_hi = mid, x
    return OracleResult(hi, _clean_certificate(x_hi, m), iterations, hi - lo)


def _oracle_ml(priors: np.ndarray, D: float, tol: float) -> OracleResult:
    K, m = priors.shape
    nv = m * m
    c = np.concatenate([np.zeros(nv), np.ones(m)])
    # Q(j|i) - t_j <= 0
    i, j = np.divmod(np.arange(nv), m)
    A_col = np.zeros((nv, nv + m))
    A_col[np.arange(nv), np.arange(nv)] = 1.0
    A_col[np.arange(nv), nv + j] = -1.0
    valid = np.zeros((K, nv + m))
    valid[:, np.arange(m) * (m + 1)] = -priors
    A_ub = np.vstack([A_col, valid])
    b_ub = np.concatenate([np.zeros(nv), np.full(K, -(1.0 - D))])
    A_eq = np.hstack([np.kron(np.eye(m), np.ones(m)), np.zeros((m, m))])
    res = solve_lp(c, A_ub, b_ub, A_eq, np.ones(m))
    if not res.success:
        raise RuntimeError(f"maximal-leakage LP failed: {res.status}")
    return OracleResult(max(0.0, math.log(res.fun)), _clean_certificate(res.x[:nv], m),
                        res.iterations, tol)


# --------------------------------------------------------------------------- convex oracles


def _blahut_arimoto(p: np.ndarray, slope: float, q0: np.ndarray, max_iter=20000, tol=1e-15):
    m = p.size
    kernel = np.exp(-slope * (1.0 - np.eye(m)))
    q = q0
    for it in range(1, max_iter + 1):
        Q = q[None, :] * kernel
        Q /= Q.sum(axis=1, keepdims=True)
        q_new = p @ Q
        if np.max(np.abs(q_new - q)) < tol:
            q = q_new
            break
        q = q_new
    Q = q[None, :] * kernel
    Q /= Q.sum(axis=1, keepdims=True)
    return Q, q, it


def _oracle_mutual_info(p: np.ndarray, D: float, tol: float) -> OracleResult:
    m = p.size
    space = ProductSpace(m, 1)
    top = int(np.argmax(p))
    if D >= 1.0 - p[top]:
        Q = np.zeros((m, m))
        Q[:, top] = 1.0
        return OracleResult(0.0, Mechanism(space, Q), 0, 0.0)

    q0 = np.full(m, 1.0 / m)
    total = 0

    def distortion(slope):
        nonlocal q0, total
        Q, q, its = _blahut_arimoto(p, slope, q0)
        total += its
        q0 = np.where(q > 1e-300, q, 1e-300)
        q0 /= q0.sum()
        return Q, float(p @ (1.0 - np.diag(Q)))

    lo, hi = 0.0, 1.0
    Q_hi, d_hi = distortion(hi)
    while d_hi > D:
        lo, hi = hi, 2 * hi
        Q_hi, d_hi = distortion(hi)
    for _ in range(200):
        if hi - lo < 1e-13 * max(1.0, hi) or D - d_hi < 1e-13:
            break
        mid = 0.5 * (lo + hi)
        Q, d = distortion(mid)
        if d > D:
            lo = mid
        else:
            hi, Q_hi, d_hi = mid, Q, d
    value = max(0.0, _mutual_info_from_probs(Q_hi, p))
    # Along the curve the slope is -R'(D), so the slack in distortion costs at most hi*(D - d_hi).
    slack = hi * max(0.0, D - d_hi)
    return OracleResult(value, Mechanism(space, Q_hi), total, max(slack, tol))


def _project_rows(Y: np.ndarray, floor: float) -> np.ndarray:
    """Euclidean projection of each row onto ``{x >= floor, sum x = 1}``."""
    m = Y.shape[1]
    radius = 1.0 - m * floor
    Z = Y - floor
    U = -np.sort(-Z, axis=1)
    css = np.cumsum(U, axis=1) - radius
    idx = np.arange(1, m + 1)
    cond = U - css / idx > 0
    rho = m - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(Z.shape[0]), rho] / (rho + 1)
    return np.maximum(Z - theta[:, None], 0.0) + floor


def _project_feasible(Y: np.ndarray, p: np.ndarray, D: float, floor: float) -> np.ndarray:
    """Projection onto row-stochastic matrices meeting ``sum_i p_i Q_ii >= 1 - D``.

    The projection onto the intersection is the row projection of ``Y + lam W``
    for the smallest multiplier ``lam >= 0`` restoring validity.  The validity
    margin is piecewise linear and non-decreasing in ``lam``, so a safeguarded
    secant (Illinois) search lands on it in a few steps.
    """
    W = np.diag(p)
    target = 1.0 - D

    def gap(lam):
        X = _project_rows(Y + lam * W, floor)
        return X, float(np.sum(W * X)) - target

    X, g_lo = gap(0.0)
    if g_lo >= 0:
        return X
    lo, hi = 0.0, 1.0
    X_hi, g_hi = gap(hi)
    while g_hi < 0:
        lo, g_lo = hi, g_hi
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("validity constraint cannot be met")
        X_hi, g_hi = gap(hi)
    side = 0
    for _ in range(100):
        lam = (lo * g_hi - hi * g_lo) / (g_hi - g_lo)
        if not lo < lam < hi:
            lam = 0.5 * (lo + hi)
        X, g = gap(lam)
        if 0 <= g <= 1e-13:
            return X
        if g < 0:
            lo, g_lo = lam, g
            if side == -1:
                g_hi *= 0.5
            side = -1
        else:
            hi, g_hi, X_hi = lam, g, X
            if side == 1:
                g_lo *= 0.5
            side = 1
        if hi - lo <= 1e-15 * hi:
            break
    return X_hi


def _sibson_objective(alpha: float, p: np.ndarray):
    def f(Q):
        s = p @ Q ** alpha
        g = s ** (1.0 / alpha)
        value = g.sum()
        grad = p[:, None] * Q ** (alpha - 1.0) * (s ** (1.0 / alpha - 1.0))[None, :]
        return value, grad

    def to_loss(v):
        return max(0.0, alpha / (alpha - 1.0) * math.log(v))

    return f, to_loss


def _renyi_pair_logs(alpha: float, m: int):
    pairs = np.array([(i, k) for i in range(m) for k in range(m) if i != k])
    I, K = pairs[:, 0], pairs[:, 1]

    def logs(Q):
        logQ = np.log(Q)
        E = alpha * logQ[I] + (1.0 - alpha) * logQ[K]
        top = E.max(axis=1, keepdims=True)
        w = np.exp(E - top)
        S = w.sum(axis=1, keepdims=True)
        return (top[:, 0] + np.log(S[:, 0])) / (alpha - 1.0), w / S

    return I, K, logs


def _renyi_objective(alpha: float, m: int, temperature: float):
    """Soft maximum (at ``temperature``) of the pairwise Renyi divergences, in log space."""
    I, K, logs = _renyi_pair_logs(alpha, m)

    def f(Q):
        L, w = logs(Q)
        top = L.max()
        u = np.exp((L - top) / temperature)
        Z = u.sum()
        u /= Z
        grad = np.zeros_like(Q)
        np.add.at(grad, I, u[:, None] * alpha / (alpha - 1.0) * w / Q[I])
        np.add.at(grad, K, -u[:, None] * w / Q[K])
        return top + temperature * math.log(Z), grad

    return f


def _renyi_exact(alpha: float, m: int):
    _, _, logs = _renyi_pair_logs(alpha, m)
    return lambda Q: max(0.0, float(logs(Q)[0].max()))


def _projected_descent(f, project, Q0, tol, max_iter=600, patience=5, exact=None):
    """Accelerated projected gradient with backtracking and adaptive restart.

    Steps are measured relative to the gradient's largest entry, which can be
    huge near the probability floor.  The run stops after ``patience`` steps
    of negligible progress.  With ``exact`` given, the iterate with the lowest
    exact loss is returned (``f`` may be a smoothed surrogate).
    """
    Q = project(Q0)
    val, _ = f(Q)
    best_Q, best = Q, exact(Q) if exact else val
    Z, momentum = Q, 1.0
    step, quiet, its = 1.0, 0, 0
    for its in range(1, max_iter + 1):
        vz, gz = f(Z)
        scale = float(np.max(np.abs(gz))) or 1.0
        while True:
            Qn = project(Z - (step / scale) * gz)
            diff = Qn - Z
            vn, _ = f(Qn)
            if vn <= vz + np.sum(gz * diff) + np.sum(diff * diff) * scale / (2 * step) + 1e-15:
                break
            step *= 0.5
            if step < 1e-15:
                return best_Q, best, its
        if vn > val:
            # Momentum overshot: restart from the last iterate without it.
            Z, momentum = Q, 1.0
            continue
        gain = val - vn
        nxt = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * momentum * momentum))
        Z = Qn + ((momentum - 1.0) / nxt) * (Qn - Q)
        Z = project(Z) if np.any(Z < 0) else Z
        momentum = nxt
        moved = float(np.max(np.abs(Qn - Q)))
        Q, val = Qn, vn
        current = exact(Q) if exact else val
        if current < best:
            best_Q, best = Q, current
        quiet = quiet + 1 if gain <= 1e-3 * tol * max(1.0, abs(val)) else 0
        if quiet >= patience or moved < 1e-12:
            break
        step = min(2.0 * step, 1.0)
    return best_Q, best, its


def oracle_pd_convex(notion: PrivacyNotion, P: Prior, D: float, tol: float = 1e-4,
                     restarts: int = 16, seed: int = 0) -> OracleResult:
    """Numerical optimum for mutual information, Sibson MI or Renyi DP.

    Mutual information uses Blahut-Arimoto and is accurate to ``tol``.  The
    other two notions run projected gradient descent from ``restarts``
    random starting mechanisms plus randomized response at distortion ``D``;
    the best value is returned and ``certified`` is cleared when the restarts
    disagree by more than ``10 * tol``.
    """
    p = _prior_matrix(P)[0]
    m = p.size
    if m > MAX_M_CONVEX:
        raise ValueError(f"convex oracle limited to m <= {MAX_M_CONVEX}")
    if not 0 < D <= 1:
        raise ValueError("distortion must lie in (0, 1]")
    kind = notion.kind
    if kind is NotionKind.MUTUAL_INFO:
        return _oracle_mutual_info(p, D, tol)
    if kind not in (NotionKind.SIBSON, NotionKind.RENYI_DP):
        raise ValueError(f"no convex oracle for {notion.label}")
    space = ProductSpace(m, 1)
    if D >= 1.0 - 1.0 / m:
        return OracleResult(0.0, Mechanism(space, np.full((m, m), 1.0 / m)), 0, 0.0)
    alpha = notion.alpha
    floor = 1e-9

    def project(Y):
        return _project_feasible(Y, p, D, floor)

    if kind is NotionKind.SIBSON:
        f, to_loss = _sibson_objective(alpha, p)
        exact = lambda Q: to_loss(f(Q)[0])  # noqa: E731
        stages = [f]
    else:
        exact = _renyi_exact(alpha, m)
        stages = [_renyi_objective(alpha, m, t) for t in (1e-2, 1e-3, 1e-4)]

    rng = np.random.default_rng(seed)
    starts = [np.full((m, m), D / (m - 1)) + np.eye(m) * (1.0 - D - D / (m - 1))]
    # Random starts are pulled halfway to uniform so no entry begins at the floor.
    starts += [0.5 * rng.dirichlet(np.ones(m), size=m) + 0.5 / m for _ in range(restarts)]
    finals = []
    best_val, best_Q, total = math.inf, None, 0
    for Q in starts:
        for g in stages:
            Q, v, its = _projected_descent(g, project, Q, tol, exact=exact)
            total += its
        finals.append(v)
        if v < best_val:
            best_val, best_Q = v, Q
    spread = max(finals) - min(finals)
    certified = spread <= 10 * tol
    note = "" if certified else f"restart spread {spread:.3g} exceeds 10*tol"
    cert = Mechanism(space, best_Q)
    value = eval_loss(notion, cert, Prior(space, p) if notion.prior_required else None)
    return OracleResult(value, cert, total, spread, certified, note)


# --------------------------------------------------------------------------- verification

_EQ_TOL = 1e-5
_MI_TOL = 1e-4
_BRACKET_TOL = 1e-6
_CONSTRUCT_TOL = 1e-6
_CONVEX_EVERY = 5


class _Tally:
    def __init__(self, notion: str, theorem: str, tolerance: float):
        self.notion, self.theorem, self.tolerance = notion, theorem, tolerance
        self.max_dev, self.worst, self.checks = 0.0, None, 0

    def add(self, dev: float, case: dict):
        self.checks += 1
        if self.worst is None or dev > self.max_dev:
            self.max_dev, self.worst = float(dev), case

    def as_dict(self) -> dict:
        return {"notion": self.notion, "theorem": self.theorem, "max_dev": self.max_dev,
                "tolerance": self.tolerance, "passed": self.max_dev <= self.tolerance,
                "checks": self.checks, "worst_case": self.worst}


def _random_sorted_prior(rng: np.random.Generator, m: int, floor: float = 0.01) -> Prior:
    while True:
        p = np.sort(rng.dirichlet(np.ones(m)))[::-1]
        if p.min() >= floor:
            return Prior.of(p)


def _bracket_violation(value: float, lower: float, upper: float) -> float:
    return max(0.0, lower - value, value - upper)


def verify_closed_forms(seed: int = 1, trials: int = 50, only: Sequence[str] | None = None) -> dict:
    """Check every closed form against the oracles on random instances.

    Each trial draws its own generator from ``(seed, trial)``, so the report
    does not depend on the order in which trials run.

    Returns:
        ``{"seed", "trials", "passed", "results"}`` where each result has
        ``notion``, ``theorem``, ``max_dev``, ``tolerance``, ``passed``,
        ``checks`` and ``worst_case`` (prior and ``D``).  Bracket checks report
        the largest distance outside the bracket.
    """
    from putlab.catalog import optimal_adp_mechanism, optimal_ml_mechanism
    from putlab.core import SourceSet
    from putlab.global_pd import global_bounds
    from putlab.local import (adp_known_prior, class1_pd, cumulative_tail, dp_known_prior,
                              ml_distortion_from_leakage, ml_known_prior)
    from putlab.losses import max_leakage_loss

    if int(trials) != trials or trials < 1:
        raise ValueError("trials must be a positive integer")
    wanted = None if only is None else {s.lower() for s in only}
    tallies: dict[tuple[str, str], _Tally] = {}

    def tally(notion, theorem, tol):
        key = (notion, theorem)
        if key not in tallies:
            tallies[key] = _Tally(notion, theorem, tol)
        return tallies[key]

    def on(name):
        return wanted is None or name in wanted

    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        m = int(rng.integers(2, 6))
        P = _random_sorted_prior(rng, m)
        space = P.space
        U = Prior.uniform(space)
        S, SU = SourceSet.singleton(P), SourceSet.singleton(U)
        grid = np.sort(rng.uniform(0.01, 0.99, size=5))
        delta = float(rng.choice([0.05, 0.1, 0.3]))
        probs = [round(float(x), 15) for x in P.probs]

        def case(D, **extra):
            return {"prior": probs, "D": float(D), **extra}

        for D in grid:
            D = float(D)
            if on("dp"):
                o = oracle_pd_lp(PrivacyNotion.dp(), P, D).value
                tally("dp", "known-prior closed form", _EQ_TOL).add(abs(o - dp_known_prior(P, D)), case(D))
                b = global_bounds(PrivacyNotion.dp(), S, space, D)
                tally("dp", "n=1 global bracket", _BRACKET_TOL).add(
                    _bracket_violation(o, b.lower, b.upper), case(D))
                ou = oracle_pd_lp(PrivacyNotion.dp(), U, D).value
                tally("dp", "uniform-prior closed form", _EQ_TOL).add(
                    abs(ou - class1_pd(PrivacyNotion.dp(), m, D, SU).upper), case(D, uniform=True))
            if on("adp"):
                notion = PrivacyNotion.approx_dp(delta)
                o = oracle_pd_lp(notion, P, D).value
                tally("adp", "known-prior closed form", _EQ_TOL).add(
                    abs(o - adp_known_prior(P, D, delta)), case(D, delta=delta))
                b = global_bounds(notion, S, space, D)
                tally("adp", "n=1 global bracket", _BRACKET_TOL).add(
                    _bracket_violation(o, b.lower, b.upper), case(D, delta=delta))
            if on("ml"):
                o = oracle_pd_lp(PrivacyNotion.max_leakage(), P, D).value
                tally("ml", "known-prior closed form", _EQ_TOL).add(abs(o - ml_known_prior(P, D)), case(D))
                b = global_bounds(PrivacyNotion.max_leakage(), S, space, D)
                tally("ml", "n=1 global bracket", _BRACKET_TOL).add(
                    _bracket_violation(o, b.lower, b.upper), case(D))
                ou = oracle_pd_lp(PrivacyNotion.max_leakage(), U, D).value
                tally("ml", "uniform-prior closed form", _EQ_TOL).add(
                    abs(ou - class1_pd(PrivacyNotion.max_leakage(), m, D, SU).upper), case(D, uniform=True))
            if on("maxinfo"):
                o = oracle_pd_lp(PrivacyNotion.max_info(), P, D).value
                b = global_bounds(PrivacyNotion.max_info(), S, space, D)
                tally("maxinfo", "n=1 global bracket", _BRACKET_TOL).add(
                    _bracket_violation(o, b.lower, b.upper), case(D))
                ou = oracle_pd_lp(PrivacyNotion.max_info(), U, D).value
                b = class1_pd(PrivacyNotion.max_info(), m, D, SU)
                tally("maxinfo", "uniform-prior bracket", _BRACKET_TOL).add(
                    _bracket_violation(ou, b.lower, b.upper), case(D, uniform=True))
            if on("mi") and m <= MAX_M_CONVEX:
                o = oracle_pd_convex(PrivacyNotion.mutual_info(), U, D, tol=1e-7).value
                tally("mi", "uniform-prior closed form", _MI_TOL).add(
                    abs(o - class1_pd(PrivacyNotion.mutual_info(), m, D, SU).upper), case(D, uniform=True))

        if m <= MAX_M_CONVEX and t % _CONVEX_EVERY == 0:
            # Prefer a level below the zero region, where the check has content.
            live = grid[grid < 1.0 - 1.0 / m]
            pool = live if live.size else grid
            D = float(pool[int(rng.integers(pool.size))])
            alpha = float(rng.choice([1.5, 2.0, 4.0]))
            for name, notion in (("sibson", PrivacyNotion.sibson(alpha)), ("rdp", PrivacyNotion.renyi(alpha))):
                if not on(name):
                    continue
                o = oracle_pd_convex(notion, P, D, seed=t).value
                b = global_bounds(notion, S, space, D)
                tally(name, "n=1 global bracket", _BRACKET_TOL).add(
                    _bracket_violation(o, b.lower, b.upper), case(D, alpha=alpha))

        tail = cumulative_tail(P.probs)
        if on("adp"):
            feasible = [float(D) for D in grid if D < (1.0 - delta) * tail[-2]]
            if feasible:
                D = feasible[0]
                Q = optimal_adp_mechanism(P, D, delta)
                dev = abs(eval_loss(PrivacyNotion.approx_dp(delta), Q) - adp_known_prior(P, D, delta))
                shortfall = max(0.0, 1.0 - D - float(P.probs @ np.diag(Q.rows)))
                tally("adp", "optimal mechanism", _CONSTRUCT_TOL).add(max(dev, shortfall),
                                                                     case(D, delta=delta))
        if on("ml"):
            feasible = [float(D) for D in grid if D < tail[-2]]
            if feasible:
                D = feasible[0]
                Q = optimal_ml_mechanism(P, D)
                dev = abs(max_leakage_loss(Q) - ml_known_prior(P, D))
                shortfall = max(0.0, 1.0 - D - float(P.probs @ np.diag(Q.rows)))
                tally("ml", "optimal mechanism", _CONSTRUCT_TOL).add(max(dev, shortfall), case(D))
            eps = float(rng.uniform(0.0, math.log(m) - 0.01))
            back = ml_known_prior(P, ml_distortion_from_leakage(P, eps))
            tally("ml", "leakage-to-distortion inverse", 1e-9).add(abs(back - eps), {"prior": probs, "eps": eps})

    results = [tallies[k].as_dict() for k in sorted(tallies)]
    return {"seed": int(seed), "trials": int(trials), "passed": all(r["passed"] for r in results),
            "results": results}
