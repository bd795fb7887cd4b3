"""One-dimensional search over the largest diagonal entry of a local mechanism."""

import math

import numpy as np

GRID_POINTS = 1024
GOLDEN_TOL = 1e-9
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, lo, hi, tol=GOLDEN_TOL):
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def minimise_over_top_diagonal(objective, D: float):
    """Minimise ``objective(a1)`` over ``a1`` in ``[1 - D, 1)``.

    A uniform grid locates the best cell and golden-section search refines
    inside the neighbouring cells.
    """
    lo, hi = 1.0 - D, 1.0
    grid = lo + (hi - lo) * np.arange(GRID_POINTS) / GRID_POINTS
    values = np.array([objective(a) for a in grid])
    i = int(np.argmin(values))
    best_a, best_v = float(grid[i]), float(values[i])
    step = (hi - lo) / GRID_POINTS
    left = max(lo, best_a - step)
    right = min(hi - 1e-15, best_a + step)
    a, v = _golden_min(objective, left, right)
    if v < best_v:
        best_a, best_v = a, v
    return best_a, best_v
