"""Pure-Python pivoting loop mirroring the compiled ``_simplex`` kernel."""

import numpy as np


def pivot(T, r, c):
    T[r] /= T[r, c]
    T[r, c] = 1.0
    col = T[:, c].copy()
    col[r] = 0.0
    nz = np.nonzero(col)[0]
    if nz.size:
        T[nz] -= np.outer(col[nz], T[r])
        T[nz, c] = 0.0


def iterate(T, basis, n_eligible, tol, max_iter, piv_tol):
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        costs = T[m, :n_eligible]
        candidates = np.nonzero(costs < -tol)[0]
        if candidates.size == 0:
            return 0, it
        enter = int(candidates[0])
        col = T[:m, enter]
        rows = np.nonzero(col > piv_tol)[0]
        if rows.size == 0:
            return 1, it
        # Round-off can leave a basic value slightly negative; treat it as zero.
        ratios = np.maximum(T[rows, -1], 0.0) / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1.0 + best)]
        leave = int(ties[np.argmin(basis[ties])])
        pivot(T, leave, enter)
        basis[leave] = enter
        it += 1
    return 2, it
