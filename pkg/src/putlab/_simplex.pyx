# Compiled pivoting loop for the dense tableau simplex in putlab.lp.

cdef int _pivot(double[:, ::1] T, Py_ssize_t r, Py_ssize_t c) noexcept nogil:
    cdef Py_ssize_t rows = T.shape[0]
    cdef Py_ssize_t cols = T.shape[1]
    cdef Py_ssize_t i, j
    cdef double inv = 1.0 / T[r, c]
    cdef double f
    for j in range(cols):
        T[r, j] *= inv
    T[r, c] = 1.0
    for i in range(rows):
        if i == r:
            continue
        f = T[i, c]
        if f != 0.0:
            for j in range(cols):
                T[i, j] -= f * T[r, j]
            T[i, c] = 0.0
    return 0


def pivot(double[:, ::1] T, Py_ssize_t r, Py_ssize_t c):
    """Pivot the tableau in place on entry (r, c)."""
    with nogil:
        _pivot(T, r, c)


def iterate(double[:, ::1] T, long long[::1] basis, Py_ssize_t n_eligible,
            double tol, Py_ssize_t max_iter, double piv_tol):
    """Run Bland-rule simplex iterations on a tableau in place.

    The last row of ``T`` holds reduced costs (minimisation) and the last
    column holds the right-hand side.  Only the first ``n_eligible`` columns
    may enter the basis.  Pivot elements must exceed ``piv_tol``; tiny pivots
    blow up round-off and can leave basic values badly negative.

    Returns ``(status, iterations)`` with status 0 for optimal, 1 for
    unbounded and 2 when ``max_iter`` pivots were spent.
    """
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it = 0
    cdef Py_ssize_t i, j, enter, leave
    cdef double ratio, best, a
    cdef int status = 2
    with nogil:
        while it < max_iter:
            enter = -1
            for j in range(n_eligible):
                if T[m, j] < -tol:
                    enter = j
                    break
            if enter < 0:
                status = 0
                break
            leave = -1
            best = 0.0
            for i in range(m):
                a = T[i, enter]
                if a > piv_tol:
                    # Round-off can leave a basic value slightly negative; treat it as zero.
                    ratio = max(T[i, rhs], 0.0) / a
                    if leave < 0 or ratio < best:
                        leave = i
                        best = ratio
            if leave >= 0:
                # Bland tie-break: smallest basic index among near-minimal ratios.
                for i in range(m):
                    a = T[i, enter]
                    if a > piv_tol and basis[i] < basis[leave]:
                        if max(T[i, rhs], 0.0) / a <= best + 1e-12 * (1.0 + best):
                            leave = i
            if leave < 0:
                status = 1
                break
            _pivot(T, leave, enter)
            basis[leave] = enter
            it += 1
    return status, it
