"""Exact dense linear algebra over a field (Fraction or prime-field scalars).

Matrices are lists of row lists.  Pivoting is deterministic: first row with a
nonzero entry in the leftmost unprocessed column, columns scanned left to right,
so kernels, inverses and echelon forms are reproducible.
"""

from __future__ import annotations


def identity_matrix(n: int, field):
    one, zero = field.one, field.zero
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def row_reduce(matrix, field, ncols=None):
    """Row-reduce a copy of `matrix`; returns (rref rows, pivot column list)."""
    rows = [list(r) for r in matrix]
    if not rows:
        return rows, []
    n = ncols if ncols is not None else len(rows[0])
    pivots = []
    r = 0
    for c in range(n):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = field.one / rows[r][c]
        rows[r] = [inv * x for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix, field) -> int:
    return len(row_reduce(matrix, field)[1])


def kernel_basis(matrix, field, ncols: int):
    """Basis of the right kernel {x : A x = 0}, one vector per free column."""
    rref, pivots = row_reduce(matrix, field, ncols)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free_cols:
        vec = [field.zero] * ncols
        vec[fc] = field.one
        for r, pc in enumerate(pivots):
            vec[pc] = -rref[r][fc]
        basis.append(vec)
    return basis


def invert_matrix(matrix, field):
    """Inverse of a square matrix; raises ValueError when singular."""
    n = len(matrix)
    aug = [list(row) + ident_row for row, ident_row in zip(matrix, identity_matrix(n, field))]
    rref, pivots = row_reduce(aug, field, ncols=None)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in rref[:n]]


def mat_mul(a, b, field):
    if not a or not b:
        return []
    n, m, p = len(a), len(b), len(b[0])
    out = [[field.zero] * p for _ in range(n)]
    for i in range(n):
        for k in range(m):
            aik = a[i][k]
            if not aik:
                continue
            row_b = b[k]
            row_o = out[i]
            for j in range(p):
                if row_b[j]:
                    row_o[j] = row_o[j] + aik * row_b[j]
    return out


def mat_vec(a, v, field):
    out = []
    for row in a:
        acc = field.zero
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def is_zero_matrix(a) -> bool:
    return all(not x for row in a for x in row)


def in_span(vectors, vec, field, ncols: int) -> bool:
    """Whether vec lies in the span of `vectors` (all length-ncols rows)."""
    if not vectors:
        return all(not x for x in vec)
    base_rank = rank(vectors, field)
    return rank(vectors + [vec], field) == base_rank
