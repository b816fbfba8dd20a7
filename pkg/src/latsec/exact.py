"""Exact linear algebra over the integers, rationals and F2.

Everything here works on plain Python ints / Fractions and tuples of
tuples, so results are reproducible and hashable.  Matrices are tiny
(n <= 8 for every lattice this package enumerates), so asymptotics are
irrelevant; determinism is what matters.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

Row = tuple[Fraction, ...]
Matrix = tuple[Row, ...]


def frac_matrix(rows) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Matrix, v) -> Row:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_mat(v, a: Matrix) -> Row:
    return tuple(sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0])))


def det(a: Matrix) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination."""
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        d *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] * inv
                for j in range(c, n):
                    m[r][j] -= f * m[c][j]
    return sign * d


def inverse(a: Matrix) -> Matrix:
    """Exact inverse via Gauss-Jordan.  Raises ZeroDivisionError if singular."""
    n = len(a)
    m = [list(row) + list(identity(n)[i]) for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(row[n:]) for row in m)


def solve_right(a: Matrix, v) -> Row:
    """Solve x a = v for a row vector x (a square, invertible)."""
    return vec_mat(v, inverse(a))


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if x < 0:
        raise ValueError("negative argument")
    p, q = x.numerator, x.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


# ---------------------------------------------------------------------------
# Integer normal forms


def hermite_normal_form(rows: list[list[int]]) -> list[list[int]]:
    """Row-style HNF of an integer matrix whose rows span a rank-n lattice.

    Returns an n x n basis: upper triangular with positive diagonal and
    off-diagonal entries reduced modulo the pivot below them.  Input may
    have more rows than columns (redundant generators are eliminated).
    """
    m = [list(r) for r in rows]
    ncols = len(m[0])
    pivot_row = 0
    for col in range(ncols):
        # gcd-eliminate everything below pivot_row in this column
        r = pivot_row
        while True:
            nz = [i for i in range(r, len(m)) if m[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][col]))
            m[r], m[i0] = m[i0], m[r]
            if m[r][col] < 0:
                m[r] = [-x for x in m[r]]
            done = True
            for i in range(r + 1, len(m)):
                if m[i][col] != 0:
                    qf = m[i][col] // m[r][col]
                    m[i] = [a - qf * b for a, b in zip(m[i], m[r])]
                    if m[i][col] != 0:
                        done = False
            if done:
                break
        if r < len(m) and m[r][col] != 0:
            # reduce entries above the pivot into [0, pivot)
            for i in range(r):
                qf = m[i][col] // m[r][col]
                if qf:
                    m[i] = [a - qf * b for a, b in zip(m[i], m[r])]
            pivot_row += 1
    if pivot_row != ncols:
        raise ValueError("rows do not span a full-rank lattice")
    return m[:ncols]


def smith_normal_form(a: list[list[int]]):
    """Smith normal form of a nonsingular integer matrix.

    Returns (u, d, v) with u @ a @ v == diag(d), u and v unimodular and
    d[i] > 0, d[i] | d[i+1].
    """
    n = len(a)
    m = [list(r) for r in a]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_op(i, j, q):  # row_i -= q * row_j
        m[i] = [x - q * y for x, y in zip(m[i], m[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(n):
            m[r][i] -= q * m[r][j]
        for r in range(n):
            v[r][i] -= q * v[r][j]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in range(n):
            m[r][i], m[r][j] = m[r][j], m[r][i]
        for r in range(n):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    for k in range(n):
        while True:
            # move the smallest nonzero entry of the trailing block to (k, k)
            entries = [
                (abs(m[i][j]), i, j)
                for i in range(k, n)
                for j in range(k, n)
                if m[i][j] != 0
            ]
            if not entries:
                raise ValueError("matrix is singular")
            _, pi, pj = min(entries)
            if pi != k:
                swap_rows(k, pi)
            if pj != k:
                swap_cols(k, pj)
            if m[k][k] < 0:
                m[k] = [-x for x in m[k]]
                u[k] = [-x for x in u[k]]
            clean = True
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    row_op(i, k, m[i][k] // m[k][k])
                    if m[i][k] != 0:
                        clean = False
            for j in range(k + 1, n):
                if m[k][j] != 0:
                    col_op(j, k, m[k][j] // m[k][k])
                    if m[k][j] != 0:
                        clean = False
            if not clean:
                continue
            # divisibility: m[k][k] must divide the trailing block
            bad = None
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    if m[i][j] % m[k][k] != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # add the offending row to row k and restart the reduction
            m[k] = [x + y for x, y in zip(m[k], m[bad])]
            u[k] = [x + y for x, y in zip(u[k], u[bad])]
    d = [m[i][i] for i in range(n)]
    return u, d, v


# ---------------------------------------------------------------------------
# Linear algebra over F2 (vectors as tuples of 0/1 ints)


def f2_rank(rows) -> int:
    basis = []
    for row in rows:
        cur = list(row)
        for b in basis:
            lead = next(i for i, x in enumerate(b) if x)
            if cur[lead]:
                cur = [x ^ y for x, y in zip(cur, b)]
        if any(cur):
            basis.append(cur)
    return len(basis)


def f2_solve(gen_rows, target):
    """Coefficients c with sum c_i * gen_rows[i] == target over F2, or None."""
    k = len(gen_rows)
    n = len(target)
    aug = [list(gen_rows[i]) + [1 if j == i else 0 for j in range(k)] for i in range(k)]
    # forward eliminate
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, k) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        for i in range(k):
            if i != r and aug[i][c]:
                aug[i] = [x ^ y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == k:
            break
    t = list(target)
    coeffs = [0] * k
    for row_idx, c in enumerate(pivots):
        if t[c]:
            t = [x ^ y for x, y in zip(t, aug[row_idx][:n])]
            for j in range(k):
                coeffs[j] ^= aug[row_idx][n + j]
    if any(t):
        return None
    return tuple(coeffs)


def f2_nullspace(rows, n: int):
    """Basis of the dual code {v : G v^T = 0} of the row span of `rows`."""
    k = len(rows)
    # reduce generator to RREF, track pivot columns
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, k) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(k):
            if i != r and m[i][c]:
                m[i] = [x ^ y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for row_idx, pc in enumerate(pivots):
            if m[row_idx][fc]:
                v[pc] = 1
        basis.append(tuple(v))
    return basis
