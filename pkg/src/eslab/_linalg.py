"""Small exact and high-precision linear algebra helpers."""

from __future__ import annotations

from fractions import Fraction

from mpmath import matrix, mp, mpc, workprec


def rational_rank(rows) -> int:
    """Rank of a matrix given as a list of Fraction rows, by elimination."""
    rows = [list(map(Fraction, r)) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    r = 0
    while r < len(rows) and col < ncols:
        pivot = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pivot is None:
            col += 1
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][col]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        r += 1
        col += 1
        rank += 1
    return rank


def rational_kernel_dim(rows) -> int:
    if not rows:
        return 0
    return len(rows[0]) - rational_rank(rows)


def lstsq_complex(A_rows, b, precision: int):
    """Least-squares solve of A x = b over C via a real embedding.

    A_rows: list of rows of complex (mpc-convertible) entries; b: list of
    complex values.  Returns (x as list of mpc, residual norm as mpf).
    """
    with workprec(precision):
        nrows = len(A_rows)
        ncols = len(A_rows[0]) if nrows else 0
        RA = matrix(2 * nrows, 2 * ncols)
        rb = matrix(2 * nrows, 1)
        for i, row in enumerate(A_rows):
            for j, v in enumerate(row):
                v = mpc(v)
                RA[i, j] = v.real
                RA[i, j + ncols] = -v.imag
                RA[i + nrows, j] = v.imag
                RA[i + nrows, j + ncols] = v.real
            bi = mpc(b[i])
            rb[i, 0] = bi.real
            rb[i + nrows, 0] = bi.imag
        if ncols == 0:
            res = mp.sqrt(sum(abs(x) ** 2 for x in rb))
            return [], res
        x, res = mp.qr_solve(RA, rb)
        sol = [mpc(x[j], x[j + ncols]) for j in range(ncols)]
        return sol, res
