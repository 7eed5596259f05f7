"""Small dense linear algebra over exact rationals or doubles.

Exact routines never round. Float routines lean on numpy (LAPACK LU with
partial pivoting) except rank decisions, which use the single relative
pivot threshold ``RANK_RTOL`` so that rank behaves the same everywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .scalars import is_exact

RANK_RTOL = 1e-10


def _is_exact_matrix(rows) -> bool:
    return all(is_exact(x) for row in rows for x in row)


def bareiss_det(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-free elimination.

    Each row is first scaled to integers by the lcm of its denominators,
    Bareiss runs on the integer matrix and the scale is divided out at the end.
    """
    size = len(rows)
    if size == 0:
        return Fraction(1)
    if any(len(r) != size for r in rows):
        raise ValueError("determinant of a non-square matrix")
    m = []
    scale = 1
    for row in rows:
        row = [Fraction(x) for x in row]
        mult = lcm(*(x.denominator for x in row))
        scale *= mult
        m.append([x.numerator * (mult // x.denominator) for x in row])
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for i in range(k + 1, size):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = m[k][k]
        for i in range(k + 1, size):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, size):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return Fraction(sign * m[-1][-1], scale)


def float_det(rows) -> float:
    a = np.asarray(rows, dtype=float)
    if a.size == 0:
        return 1.0
    return float(np.linalg.det(a))


def det(rows):
    return bareiss_det(rows) if _is_exact_matrix(rows) else float_det(rows)


def _gauss_jordan(rows, rhs_columns):
    """Exact Gauss-Jordan on [A | B]. Returns the solution columns or None if A is singular."""
    size = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(c[i]) for c in rhs_columns] for i, row in enumerate(rows)]
    width = len(aug[0]) if aug else 0
    for col in range(size):
        piv = next((i for i in range(col, size) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        prow = [x / pv for x in aug[col]]
        aug[col] = prow
        for i in range(size):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                row_i = aug[i]
                for j in range(col, width):
                    if prow[j]:
                        row_i[j] -= f * prow[j]
    return [[aug[i][size + c] for i in range(size)] for c in range(len(rhs_columns))]


def solve(rows, rhs):
    """Solve A x = b. Raises ``np.linalg.LinAlgError`` when A is singular."""
    if _is_exact_matrix(rows) and all(is_exact(x) for x in rhs):
        sol = _gauss_jordan(rows, [list(rhs)])
        if sol is None:
            raise np.linalg.LinAlgError("singular matrix")
        return sol[0]
    x = np.linalg.solve(np.asarray(rows, dtype=float), np.asarray(rhs, dtype=float))
    return [float(v) for v in x]


def inverse(rows):
    """Matrix inverse as a list of rows. Raises ``np.linalg.LinAlgError`` when singular."""
    size = len(rows)
    if _is_exact_matrix(rows):
        identity = [[Fraction(int(i == j)) for i in range(size)] for j in range(size)]
        cols = _gauss_jordan(rows, identity)
        if cols is None:
            raise np.linalg.LinAlgError("singular matrix")
        return [[cols[j][i] for j in range(size)] for i in range(size)]
    inv = np.linalg.inv(np.asarray(rows, dtype=float))
    return [[float(v) for v in row] for row in inv]


def rref(rows, exact: bool | None = None, rtol: float = RANK_RTOL):
    """Reduced row echelon form. Returns ``(reduced_rows, pivot_columns)``.

    Exact mode pivots on the first nonzero entry; float mode on the largest
    magnitude in the column and treats entries below ``rtol`` times the
    largest pivot seen (or the largest input entry) as zero.
    """
    if exact is None:
        exact = _is_exact_matrix(rows)
    m = [[Fraction(x) for x in row] if exact else [float(x) for x in row] for row in rows]
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    scale = 0.0 if exact else max((abs(x) for row in m for x in row), default=0.0)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        if exact:
            piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        else:
            piv = max(range(r, nrows), key=lambda i: abs(m[i][c]))
            if abs(m[piv][c]) <= rtol * scale or m[piv][c] == 0:
                piv = None
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        if not exact:
            for i in range(nrows):
                if i != r:
                    m[i][c] = 0.0
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows, exact: bool | None = None) -> int:
    return len(rref(rows, exact)[1])


def kernel_vector(rows, ncols: int, exact: bool | None = None):
    """A nonzero vector v with A v = 0, or None if A has full column rank.

    The first free column is set to 1 and the pivot variables solved for.
    """
    if exact is None:
        exact = _is_exact_matrix(rows)
    reduced, pivots = rref(rows, exact)
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    v = [zero] * ncols
    v[f] = one
    for r, pc in enumerate(pivots):
        v[pc] = -reduced[r][f]
    return v


class RowBasis:
    """Incrementally grown echelon basis; decides whether a new row raises the rank.

    Used by greedy unisolvent selection. Exact mode pivots on the first
    nonzero residual entry, float mode on the largest (ties to the lowest column).
    """

    def __init__(self, ncols: int, exact: bool, rtol: float = RANK_RTOL):
        self.ncols = ncols
        self.exact = exact
        self.rtol = rtol
        self.rows: list[tuple[int, list]] = []
        self.largest_pivot = 0.0

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, row):
        v = [Fraction(x) for x in row] if self.exact else [float(x) for x in row]
        for pc, b in self.rows:
            f = v[pc]
            if f:
                v = [a - f * bb for a, bb in zip(v, b)]
        return v

    def try_add(self, row) -> bool:
        raw_scale = 0.0 if self.exact else max((abs(float(x)) for x in row), default=0.0)
        v = self.reduce(row)
        if self.exact:
            pc = next((c for c, x in enumerate(v) if x != 0), None)
            if pc is None:
                return False
        else:
            pc = max(range(self.ncols), key=lambda c: (abs(v[c]), -c))
            ref = max(self.largest_pivot, raw_scale)
            if v[pc] == 0 or abs(v[pc]) <= self.rtol * ref:
                return False
            self.largest_pivot = max(self.largest_pivot, abs(v[pc]))
        pv = v[pc]
        self.rows.append((pc, [x / pv for x in v]))
        return True
