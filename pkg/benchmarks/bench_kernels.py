"""Compare the compiled simplex kernel with the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Each workload is solved
with both backends; the script checks that they agree and prints the mean
time per solve.
"""

import argparse
import math
import time

import numpy as np

from putlab.core import Prior, PrivacyNotion
from putlab.lp import KERNELS, solve_lp
from putlab.oracle import _Feasibility


def dp_margin_lp(m: int, D: float, eps: float):
    probs = np.sort(np.random.default_rng(m).dirichlet(np.ones(m)))[::-1]
    P = Prior.of(probs)
    feas = _Feasibility(PrivacyNotion.dp(), P.probs[None, :], D)
    A = feas.den.copy()
    A[feas.num_idx] += math.exp(-eps)
    A_ub = np.vstack([A, feas.margin])
    b_ub = np.zeros(A_ub.shape[0])
    return feas.cost, A_ub, b_ub, feas.A_eq, feas.b_eq


def random_lp(rng, n=20, rows=15):
    c = rng.normal(size=n)
    A = rng.uniform(0, 1, size=(rows, n))
    b = rng.uniform(1, 2, size=rows)
    return -np.abs(c), A, b, None, None


def bench(problem, backend, repeat):
    start = time.perf_counter()
    for _ in range(repeat):
        res = solve_lp(*problem, backend=backend)
    return (time.perf_counter() - start) / repeat, res


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()
    if "compiled" not in KERNELS:
        print("compiled kernel not built; only the Python fallback is available")
        return
    rng = np.random.default_rng(0)
    workloads = [(f"dp margin LP m={m}", dp_margin_lp(m, 0.1, 1.5)) for m in (3, 4, 5, 6)]
    workloads.append(("random dense LP 15x20", random_lp(rng)))
    print(f"{'workload':<24}{'compiled (ms)':>15}{'python (ms)':>14}{'speed-up':>10}")
    for name, problem in workloads:
        t_c, r_c = bench(problem, "compiled", args.repeat)
        t_p, r_p = bench(problem, "python", max(1, args.repeat // 4))
        assert r_c.status == r_p.status and abs(r_c.fun - r_p.fun) <= 1e-9 * (1 + abs(r_p.fun)), name
        print(f"{name:<24}{1e3 * t_c:>15.3f}{1e3 * t_p:>14.3f}{t_p / t_c:>10.1f}")


if __name__ == "__main__":
    main()
