"""Smith normal form over the integers, with unimodular transforms.

Matrices are lists of lists of Python ints so that no entry can overflow.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

Matrix = List[List[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [
        [sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
        for i in range(len(a))
    ]


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> List[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def smith_normal_form(a: Sequence[Sequence[int]], ncols: int | None = None) -> Tuple[Matrix, Matrix, Matrix]:
    """Return ``(D, U, V)`` with ``U @ A @ V == D`` and ``U``, ``V`` unimodular.

    ``D`` is diagonal with nonnegative entries ``d_0 | d_1 | ...``.  ``ncols``
    is needed only when ``a`` has no rows.
    """
    m = len(a)
    n = len(a[0]) if m else (ncols or 0)
    d = [list(map(int, row)) for row in a]
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):
        # row_dst += k * row_src
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        for row in d:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero magnitude in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(t, i, -(d[i][t] // d[t][t]))
                    if d[i][t]:
                        done = False
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(t, j, -(d[t][j] // d[t][t]))
                    if d[t][j]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                     if d[i][j] % d[t][t]),
                    None,
                )
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            # move the smallest remaining entry of row/column t to the pivot
            cands = [(i, t) for i in range(t, m) if d[i][t]] + [(t, j) for j in range(t, n) if d[t][j]]
            i, j = min(cands, key=lambda ij: abs(d[ij[0]][ij[1]]))
            swap_rows(t, i)
            swap_cols(t, j)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return d, u, v


def rank(a: Sequence[Sequence[int]], ncols: int | None = None) -> int:
    d, _, _ = smith_normal_form(a, ncols)
    return sum(1 for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i])


def invariant_factors(a: Sequence[Sequence[int]], ncols: int | None = None) -> List[int]:
    d, _, _ = smith_normal_form(a, ncols)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int], ncols: int) -> List[int] | None:
    """One integer solution of ``a x = b``, or ``None`` if none exists."""
    d, u, v = smith_normal_form(a, ncols)
    ub = matvec(u, b) if a else []
    y = [0] * ncols
    for i, val in enumerate(ub):
        piv = d[i][i] if i < ncols else 0
        if piv == 0:
            if val != 0:
                return None
            continue
        if val % piv:
            return None
        y[i] = val // piv
    return matvec(v, y)


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant via fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return int(det)
