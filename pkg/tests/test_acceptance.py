"""The nine acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed together at the
end of the pytest run and also echoed to stdout (visible with ``-s``).
"""

import math
import subprocess
import sys
import time

import numpy as np

from putlab import (Prior, PrivacyNotion, ProductSpace, SourceSet, adp_known_prior, approx_dp_composition,
                    class1_pd, composed_loss_law, dp_known_prior, eval_loss, expected_distortion, global_bounds,
                    ml_distortion_from_leakage, ml_known_prior, optimal_adp_mechanism, optimal_ml_mechanism,
                    oracle_pd_convex, oracle_pd_lp, randomized_response, wang_mechanism)
from putlab.composition import realize
from putlab.local import cumulative_tail
from putlab.losses import approx_dp_loss

from conftest import ACCEPTANCE_LINES, random_mechanism, random_sorted_prior

P4 = Prior.of([0.4, 0.3, 0.2, 0.1])


class Criterion:
    """Collects the worst deviation for one criterion and reports it."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.worst = 0.0
        self.failures = []
        self.start = time.perf_counter()

    def check(self, ok, what):
        if not ok and len(self.failures) < 5:
            self.failures.append(what)

    def close(self, dev, tol, what):
        dev = abs(dev) if not math.isnan(dev) else math.inf
        self.worst = max(self.worst, dev)
        self.check(dev <= tol, f"{what}: deviation {dev:.3g} > {tol:g}")

    def finish(self, extra=""):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if not self.failures else "FAIL"
        line = (f"criterion {self.number} [{status}] {self.title}: worst deviation {self.worst:.3g}, "
                f"{elapsed:.1f}s{extra}")
        ACCEPTANCE_LINES[self.number] = line
        print(line)
        assert not self.failures, "; ".join(self.failures)


def test_criterion_1_known_prior_closed_forms_match_oracle():
    c = Criterion(1, "known-prior DP/ADP/ML closed forms vs LP oracle (tol 1e-5)")
    for t in range(50):
        rng = np.random.default_rng([2024, t])
        m = 2 + t % 4
        P = random_sorted_prior(rng, m)
        grid = np.sort(rng.uniform(0.01, 0.99, size=20))
        for D in map(float, grid):
            c.close(oracle_pd_lp(PrivacyNotion.dp(), P, D).value - dp_known_prior(P, D), 1e-5, f"dp m={m} D={D}")
            c.close(oracle_pd_lp(PrivacyNotion.max_leakage(), P, D).value - ml_known_prior(P, D), 1e-5,
                    f"ml m={m} D={D}")
            for delta in (0.05, 0.1, 0.3):
                o = oracle_pd_lp(PrivacyNotion.approx_dp(delta), P, D).value
                c.close(o - adp_known_prior(P, D, delta), 1e-5, f"adp({delta}) m={m} D={D}")
    elapsed = time.perf_counter() - c.start
    c.check(elapsed < 300, f"runtime {elapsed:.0f}s over the 5 minute budget")
    c.finish()


def test_criterion_2_four_symbol_anchor_points():
    c = Criterion(2, "anchor points of the prior (0.4,0.3,0.2,0.1)")
    c.check(dp_known_prior(P4, 0.6) == 0.0 and dp_known_prior(P4, 0.6 - 1e-9) > 0, "DP jump not at 0.6")
    c.check(adp_known_prior(P4, 0.54, 0.1) == 0.0 and adp_known_prior(P4, 0.54 - 1e-9, 0.1) > 0,
            "ADP jump not at 0.54")
    anchors = [
        (PrivacyNotion.max_leakage(), ml_known_prior(P4, 0.2), math.log(2.5)),
        (PrivacyNotion.dp(), dp_known_prior(P4, 0.2), math.log(12.0)),
        (PrivacyNotion.approx_dp(0.1), adp_known_prior(P4, 0.2, 0.1), math.log(10.5)),
    ]
    for notion, closed, expected in anchors:
        c.close(closed - expected, 1e-9, f"{notion.label} formula")
        c.close(oracle_pd_lp(notion, P4, 0.2, tol=1e-8).value - expected, 1e-5, f"{notion.label} oracle")
    for notion, D in [(PrivacyNotion.dp(), 0.6), (PrivacyNotion.approx_dp(0.1), 0.54)]:
        c.close(oracle_pd_lp(notion, P4, D, tol=1e-8).value, 1e-5, f"{notion.label} oracle zero at {D}")
    c.finish()


def test_criterion_3_class1_exactness():
    c = Criterion(3, "Class I DP/ML (1e-5) and MI (1e-4) vs oracles, zero region")
    grid = np.arange(1, 100) / 100
    for m in (2, 3, 4):
        S = SourceSet.full_simplex(ProductSpace(m, 1))
        U = Prior.uniform(ProductSpace(m, 1))
        for D in map(float, grid):
            dp = class1_pd(PrivacyNotion.dp(), m, D, S).value
            ml = class1_pd(PrivacyNotion.max_leakage(), m, D, S).value
            mi = class1_pd(PrivacyNotion.mutual_info(), m, D, S).value
            c.close(oracle_pd_lp(PrivacyNotion.dp(), U, D).value - dp, 1e-5, f"dp m={m} D={D}")
            c.close(oracle_pd_lp(PrivacyNotion.max_leakage(), U, D).value - ml, 1e-5, f"ml m={m} D={D}")
            c.close(oracle_pd_convex(PrivacyNotion.mutual_info(), U, D, tol=1e-7).value - mi, 1e-4,
                    f"mi m={m} D={D}")
            if D >= (m - 1) / m:
                c.check(dp == ml == mi == 0.0, f"nonzero closed form at m={m} D={D}")
    c.finish()


def _vertex_max_info(Q):
    # Supremum over the simplex: the prior collapses onto the input least likely to produce y.
    rows = Q.rows
    return max(0.0, float(np.max(np.log(rows.max(axis=0)) - np.log(rows.min(axis=0)))))


def _class1_set(rng, space):
    if rng.random() < 0.5:
        return SourceSet.full_simplex(space), None
    u = np.full(space.size, 1.0 / space.size)
    while True:
        p = rng.dirichlet(np.full(space.size, 20.0))
        q = 2 * u - p  # p and q average to the uniform prior
        if q.min() > 0:
            members = [Prior(space, p), Prior(space, q)]
            return SourceSet.family(members), members


def test_criterion_4_theorem_sandwich():
    c = Criterion(4, "global brackets vs Q_D on 200 Class I tuples (tol 1e-9)")
    rng = np.random.default_rng(404)
    for t in range(200):
        m, n = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        space = ProductSpace(m, n)
        D = float(rng.uniform(0.02, 0.98)) * n * (m - 1) / m
        S, members = _class1_set(rng, space)
        U = Prior.uniform(space)
        Q = wang_mechanism(space, D)
        notions = [PrivacyNotion.dp(), PrivacyNotion.approx_dp(float(rng.choice([0.01, 0.05, 0.1]))),
                   PrivacyNotion.max_info(), PrivacyNotion.max_leakage(),
                   PrivacyNotion.renyi(float(rng.choice([1.5, 2.0, 4.0]))),
                   PrivacyNotion.sibson(float(rng.choice([1.5, 2.0, 4.0]))), PrivacyNotion.mutual_info()]
        for notion in notions:
            bp = global_bounds(notion, S, space, D)
            if notion.kind.name == "MAX_INFO":
                loss = (_vertex_max_info(Q) if members is None
                        else max(eval_loss(notion, Q, P) for P in members))
            else:
                loss = eval_loss(notion, Q, U if notion.prior_required else None)
            where = f"{notion.label} m={m} n={n} D={D:.4f}"
            c.check(bp.lower <= loss + 1e-9, f"{where}: lower {bp.lower} > loss {loss}")
            if notion.kind.name in ("MAX_LEAKAGE", "SIBSON"):
                c.check(bp.upper >= loss - 1e-9, f"{where}: upper {bp.upper} < loss {loss}")
            else:
                c.close(bp.upper - loss, 1e-9, where)
    c.finish()


def test_criterion_5_limit_relations():
    c = Criterion(5, "Renyi/Sibson limits (1e-3) and monotonicity in alpha (1e-12)")
    U = Prior.of([0.5, 0.5])
    alphas = [1.5, 2, 4, 8, 64]
    for keep in (0.6, 0.75, 0.9):
        Q = randomized_response(2, keep)
        c.close(eval_loss(PrivacyNotion.renyi(1e4), Q) - eval_loss(PrivacyNotion.dp(), Q), 1e-3, f"rdp RR({keep})")
        c.close(eval_loss(PrivacyNotion.sibson(1 + 1e-6), Q, U) - eval_loss(PrivacyNotion.mutual_info(), Q, U),
                1e-3, f"sibson RR({keep})")
        rdp = [eval_loss(PrivacyNotion.renyi(a), Q) for a in alphas]
        sib = [eval_loss(PrivacyNotion.sibson(a), Q, U) for a in alphas]
        for name, seq in (("rdp", rdp), ("sibson", sib)):
            c.check(all(b >= a - 1e-12 for a, b in zip(seq, seq[1:])), f"{name} not monotone on RR({keep})")
    c.finish()


def test_criterion_6_composition_laws():
    c = Criterion(6, "composition laws on realized products (1e-9) and ADP sandwich")
    six = [PrivacyNotion.dp(), PrivacyNotion.max_info(), PrivacyNotion.max_leakage(), PrivacyNotion.renyi(2),
           PrivacyNotion.sibson(2), PrivacyNotion.mutual_info()]
    for t in range(20):
        rng = np.random.default_rng([606, t])
        m = 2 + t % 2
        base = random_mechanism(rng, m)
        P = Prior.of(rng.dirichlet(np.full(m, 2.0)))
        for n in (2, 3):
            product = realize(base, n)
            Pn = Prior.product(P, n)
            for notion in six:
                law = composed_loss_law(notion, base, P, n, check=False)
                direct = eval_loss(notion, product, Pn if notion.prior_required else None)
                c.close(direct - law, 1e-9 * max(1.0, abs(law)), f"{notion.label} m={m} n={n} t={t}")
            for delta in (0.01, 0.05, 0.1):
                bp = approx_dp_composition(base, delta, n)
                direct = approx_dp_loss(product, delta)
                c.check(bp.lower - 1e-9 <= direct <= bp.upper + 1e-9, f"adp({delta}) sandwich m={m} n={n} t={t}")
    c.finish()


def test_criterion_7_leakage_round_trip():
    c = Criterion(7, "leakage -> distortion -> leakage round trip (1e-9)")
    for t in range(20):
        rng = np.random.default_rng([707, t])
        m = int(rng.integers(2, 6))
        P = random_sorted_prior(rng, m)
        S = SourceSet.singleton(P)
        for eps in np.arange(0.0, math.log(m) - 0.01, 0.2):
            D = ml_distortion_from_leakage(S, float(eps))
            c.close(ml_known_prior(P, D) - eps, 1e-9, f"m={m} eps={eps:.2f}")
    c.finish()


def test_criterion_8_optimal_mechanisms():
    c = Criterion(8, "optimal ADP/ML mechanisms: validity (1e-9), value and diagonal identity (1e-6)")
    for t in range(40):
        rng = np.random.default_rng([808, t])
        m = int(rng.integers(2, 6))
        P = random_sorted_prior(rng, m)
        tail = cumulative_tail(P)
        delta = float(rng.choice([0.05, 0.1, 0.3]))
        for kind, top in (("ml", tail[-2]), ("adp", (1 - delta) * tail[-2])):
            D = float(rng.uniform(0.02, 0.98)) * top
            if kind == "ml":
                Q = optimal_ml_mechanism(P, D)
                loss, target = eval_loss(PrivacyNotion.max_leakage(), Q), ml_known_prior(P, D)
            else:
                Q = optimal_adp_mechanism(P, D, delta)
                loss, target = eval_loss(PrivacyNotion.approx_dp(delta), Q), adp_known_prior(P, D, delta)
                diag = np.diag(Q.rows)
                gap = diag[1:] - (math.exp(target) * Q.rows[0, 1:] + delta)
                c.close(float(np.max(np.abs(gap))) if gap.size else 0.0, 1e-6, f"diagonal identity t={t}")
            where = f"{kind} m={m} D={D:.4f} t={t}"
            c.check(Q.rows.min() >= -1e-9 and np.allclose(Q.rows.sum(axis=1), 1.0, atol=1e-9), f"{where}: rows")
            c.check(expected_distortion(Q, P) <= D + 1e-9, f"{where}: distortion")
            c.close(loss - target, 1e-6, where)
    c.finish()


def _cli(*argv, timeout=600):
    return subprocess.run([sys.executable, "-m", "putlab", *argv], capture_output=True, timeout=timeout,
                          check=False)


def test_criterion_9_cli_determinism():
    c = Criterion(9, "CLI curves byte-identical, verify --seed 1 --trials 50 exits 0 within 5 min")
    binary = ["curve", "--m", "2", "--class1", "--dp", "--adp", "0.1", "--ml", "--mi", "--rdp", "2", "--sibson", "2"]
    four = ["curve", "--m", "4", "--prior", "0.4,0.3,0.2,0.1", "--dp", "--adp", "0.1", "--ml"]
    for name, argv in (("binary", binary), ("four-symbol", four)):
        first, second = _cli(*argv), _cli(*argv)
        c.check(first.returncode == 0 and second.returncode == 0, f"{name}: nonzero exit")
        c.check(len(first.stdout) > 0 and first.stdout == second.stdout, f"{name}: output differs between runs")
    start = time.perf_counter()
    proc = _cli("verify", "--seed", "1", "--trials", "50")
    elapsed = time.perf_counter() - start
    c.check(proc.returncode == 0, f"verify exit code {proc.returncode}")
    c.check(elapsed < 300, f"verify took {elapsed:.0f}s")
    c.finish(f" (verify {elapsed:.0f}s)")
