"""Approximate inverses for rank-deficient square matrices."""

from fractions import Fraction

import numpy as np

from dowling_reps.linalg.matrix import Matrix, inverse, rank, row_reduce


def greedy_independent_rows(a: Matrix) -> list[int]:
    """Indices of rows kept by a left-to-right independence scan."""
    if a.rows == 0:
        return []
    _, pivots = row_reduce(a.entries.T.copy(), a.p)
    return pivots


def repair_rows(a: Matrix) -> tuple[Matrix, list[int]]:
    """Replace dependent rows of a square matrix by complementing unit rows.

    Returns the repaired invertible matrix and the replaced row indices.
    """
    if a.rows != a.cols:
        msg = f"Row repair needs a square matrix, got {a.shape}"
        raise ValueError(msg)
    kept = greedy_independent_rows(a)
    replaced = [i for i in range(a.rows) if i not in set(kept)]
    if not replaced:
        return a.copy(), []
    if kept:
        _, pivots = row_reduce(a.entries[kept].copy(), a.p)
    else:
        pivots = []
    free_columns = [c for c in range(a.cols) if c not in set(pivots)]
    repaired = a.entries.copy()
    for row, column in zip(replaced, free_columns, strict=True):
        repaired[row] = 0
        repaired[row, column] = 1
    return Matrix(repaired, a.p, reduced=True), replaced


def approximate_left_inverse(a: Matrix) -> tuple[Matrix, int]:
    """Invertible d with rk(I − d·a) ≤ c − rk(a).

    Dependent rows of a are replaced until the matrix is invertible; d is
    the inverse of the repaired matrix, so I − d·a = d·(a' − a) has rank at
    most the number of replaced rows.
    """
    repaired, _ = repair_rows(a)
    d = inverse(repaired)
    defect = rank(Matrix.identity(a.rows, a.p) - d @ a)
    return d, defect


def has_approximate_inverse(a: Matrix, delta: Fraction) -> bool:
    """Whether some invertible d has rk(I − d·a) ≤ c·δ.

    Brute force over GL_c(GF(p)); only meant for tiny c and p.
    """
    c, p = a.rows, a.p
    bound = delta * c
    ident = Matrix.identity(c, p)
    for flat in np.ndindex(*([p] * (c * c))):
        d = Matrix(np.array(flat, dtype=np.int64).reshape(c, c), p)
        if rank(d) < c:
            continue
        if rank(ident - d @ a) <= bound:
            return True
    return False
