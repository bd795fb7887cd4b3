"""Dense two-phase simplex for the small linear programs used across putlab.

Problems are posed as::

    minimise    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                x >= 0

Pivoting uses Bland's rule, which cannot cycle, so results are deterministic.
The pivot loop runs in a compiled kernel when the extension is built and
falls back to an equivalent numpy implementation otherwise.  Setting the
environment variable ``PUTLAB_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from putlab import _simplex_py

try:
    if os.environ.get("PUTLAB_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python kernel requested")
    from putlab import _simplex as _compiled
except ImportError:
    _compiled = None

KERNELS = {"python": _simplex_py}
if _compiled is not None:
    KERNELS["compiled"] = _compiled

#: Name of the kernel used when ``backend`` is not given.
BACKEND = "compiled" if _compiled is not None else "python"

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LPResult:
    """Outcome of :func:`solve_lp`.

    ``x`` and ``fun`` are only meaningful when ``status == "optimal"``.
    """

    status: str
    x: np.ndarray | None
    fun: float
    iterations: int

    @property
    def success(self) -> bool:
        return self.status == OPTIMAL


def _as_2d(A, ncols):
    if A is None:
        return np.zeros((0, ncols))
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[1] != ncols:
        raise ValueError(f"constraint matrix must have {ncols} columns, got shape {A.shape}")
    return A


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, tol=1e-10,
             feas_tol=None, piv_tol=1e-8, max_iter=None, backend=None) -> LPResult:
    """Solve a linear program in inequality/equality form with ``x >= 0``.

    Args:
        c: objective coefficients, length ``N``.
        A_ub, b_ub: optional inequality rows ``A_ub @ x <= b_ub``.
        A_eq, b_eq: optional equality rows.
        tol: pivot and reduced-cost tolerance.
        piv_tol: smallest pivot element accepted in the ratio test.
        feas_tol: largest total constraint violation still reported as
            feasible; defaults to ``1e3 * tol`` times the right-hand-side scale.
        max_iter: pivot budget per phase (default ``50 * (rows + cols)``).
        backend: ``"compiled"`` or ``"python"``; defaults to :data:`BACKEND`.

    Returns:
        An :class:`LPResult`.
    """
    kernel = KERNELS[backend or BACKEND]
    c = np.asarray(c, dtype=float).ravel()
    nx = c.size
    A_ub = _as_2d(A_ub, nx)
    A_eq = _as_2d(A_eq, nx)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if b_ub.size != A_ub.shape[0] or b_eq.size != A_eq.shape[0]:
        raise ValueError("right-hand side length does not match constraint rows")

    n_ub, n_eq = A_ub.shape[0], A_eq.shape[0]
    M = n_ub + n_eq
    flip_ub = b_ub < 0
    flip_eq = b_eq < 0
    # Rows needing an artificial variable: flipped inequalities and all equalities.
    needs_art = np.concatenate([flip_ub, np.ones(n_eq, dtype=bool)])
    art_rows = np.nonzero(needs_art)[0]
    n_art = art_rows.size
    n_struct = nx + n_ub
    ncols = n_struct + n_art

    T = np.zeros((M + 1, ncols + 1))
    sign_ub = np.where(flip_ub, -1.0, 1.0)
    sign_eq = np.where(flip_eq, -1.0, 1.0)
    T[:n_ub, :nx] = A_ub * sign_ub[:, None]
    T[n_ub:M, :nx] = A_eq * sign_eq[:, None]
    T[np.arange(n_ub), nx + np.arange(n_ub)] = sign_ub
    T[:n_ub, -1] = b_ub * sign_ub
    T[n_ub:M, -1] = b_eq * sign_eq

    basis = np.empty(M, dtype=np.int64)
    basis[:n_ub] = nx + np.arange(n_ub)
    T[art_rows, n_struct + np.arange(n_art)] = 1.0
    basis[art_rows] = n_struct + np.arange(n_art)

    if max_iter is None:
        max_iter = 50 * (M + ncols)
    total_iters = 0

    if n_art:
        T[M, :] = -T[art_rows, :].sum(axis=0)
        T[M, n_struct:ncols] = 0.0
        status, its = kernel.iterate(T, basis, ncols, tol, max_iter, piv_tol)
        total_iters += its
        if status == 2:
            return LPResult(ITERATION_LIMIT, None, np.nan, total_iters)
        if feas_tol is None:
            feas_tol = 1e3 * tol * (1.0 + np.abs(T[:M, -1]).max(initial=0.0))
        if -T[M, -1] > feas_tol:
            return LPResult(INFEASIBLE, None, np.nan, total_iters)
        keep = np.ones(M + 1, dtype=bool)
        for r in range(M):
            if basis[r] >= n_struct:
                row = T[r, :n_struct]
                cand = np.nonzero(np.abs(row) > 1e-9)[0]
                if cand.size:
                    kernel.pivot(T, r, int(cand[0]))
                    basis[r] = int(cand[0])
                else:
                    keep[r] = False
        if not keep.all():
            T = np.ascontiguousarray(T[keep])
            basis = np.ascontiguousarray(basis[keep[:M]])
            M = basis.size
        T[:M, n_struct:ncols] = 0.0

    cost = np.zeros(ncols)
    cost[:nx] = c
    T[M, :ncols] = cost
    T[M, -1] = 0.0
    T[M, :] -= cost[basis] @ T[:M, :]
    status, its = kernel.iterate(T, basis, n_struct, tol, max_iter, piv_tol)
    total_iters += its
    if status == 1:
        return LPResult(UNBOUNDED, None, -np.inf, total_iters)
    if status == 2:
        return LPResult(ITERATION_LIMIT, None, np.nan, total_iters)
    x = np.zeros(ncols)
    x[basis] = T[:M, -1]
    x = x[:nx]
    return LPResult(OPTIMAL, x, float(c @ x), total_iters)
