"""Exact linear algebra over the rationals and the integers."""

from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

Vector = Tuple[Fraction, ...]


def as_fraction(x) -> Fraction:
    t = type(x)
    if t is Fraction:
        return x
    if t is int:
        return Fraction(x)
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; a zero denominator raises ``ValueError``."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        num, den = int(num), int(den)
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(num, den)
    if any(c in text for c in ".eE"):
        raise ValueError(f"decimal literal {text!r} is not an exact rational")
    return Fraction(int(text))


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), 0)


def common_denominator(v: Sequence) -> Tuple[List[int], int]:
    """Integers ``n`` and ``den`` with ``v == n / den``."""
    if all(type(x) is int for x in v):
        return list(v), 1
    v = [x if type(x) in (int, Fraction) else Fraction(x) for x in v]
    den = 1
    for x in v:
        if type(x) is Fraction and den % x.denominator:
            den = lcm(den, x.denominator)
    return [x * den if type(x) is int else x.numerator * (den // x.denominator) for x in v], den


def int_matvec(rows: Sequence[Sequence[int]], v: Sequence) -> Tuple:
    """Product of an integer matrix with a rational vector; integer rows
    keep the arithmetic on Python ints, which is much cheaper."""
    nums, den = common_denominator(v)
    out = []
    for row in rows:
        t = 0
        for a, b in zip(row, nums):
            if a and b:
                t += a * b
        out.append(t if den == 1 else Fraction(t, den))
    return tuple(out)


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b if a and b else max(abs(a), abs(b))


def primitive(row: Sequence) -> Tuple[Tuple[int, ...], Fraction]:
    """Scale a rational row to a primitive integer row.

    Returns the integer row and the positive factor used, so that
    ``row * factor == result``.  The zero row is returned unchanged with
    factor 1.
    """
    nums, den = common_denominator(row)
    g = gcd(*nums) if nums else 0
    if g == 0:
        return tuple(0 for _ in row), Fraction(1)
    return tuple(x // g for x in nums), Fraction(den, g)


def primitive_int(row: Sequence[int]) -> Tuple[int, ...]:
    g = gcd(*row)
    if g <= 1:
        return tuple(row)
    return tuple(x // g for x in row)


def _echelon(rows: Sequence[Sequence], ncols: int):
    """Fraction-free Gauss-Jordan elimination on the first ``ncols`` columns.

    Rows are scaled to integers first and kept primitive, so the work stays
    on Python ints.  Returns every row (including those with no pivot) and
    the pivot columns; row ``i < len(pivots)`` has its pivot in
    ``pivots[i]``.
    """
    m = [common_denominator(r)[0] for r in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pr = m[r]
        pv = pr[c]
        for i in range(len(m)):
            f = m[i][c]
            if i != r and f:
                row = [pv * x - f * y for x, y in zip(m[i], pr)]
                g = gcd(*row)
                m[i] = [x // g for x in row] if g > 1 else row
        pivots.append(c)
        r += 1
    return m, pivots


def _normalized(row: Sequence[int], pivot: int) -> List[Fraction]:
    pv = row[pivot]
    return [Fraction(x, pv) if x else _ZERO for x in row]


_ZERO = Fraction(0)


def rref(rows: Sequence[Sequence], ncols: Optional[int] = None):
    """Reduced row echelon form over Q.

    Returns ``(matrix, pivots)`` with zero rows removed.
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    m, pivots = _echelon(rows, ncols)
    return [_normalized(m[i], c) for i, c in enumerate(pivots)], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def int_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    rk = 0
    for c in range(ncols):
        p = next((i for i in range(rk, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[rk], m[p] = m[p], m[rk]
        pr = m[rk]
        a = pr[c]
        for i in range(rk + 1, len(m)):
            b = m[i][c]
            if b:
                row = [a * x - b * y for x, y in zip(m[i], pr)]
                m[i] = list(primitive_int(row))
        rk += 1
        if rk == len(m):
            break
    return rk


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[Vector]:
    """Basis of ``{x : rows @ x = 0}`` over Q, one vector per free column."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    m, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -m[i][f]
        basis.append(tuple(v))
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence[Sequence]):
    """Solve ``matrix @ X = rhs`` column by column.

    ``rhs`` is a list of right-hand-side columns.  Returns ``(rank, X)``
    where ``X`` is a list of solution columns (free variables set to 0),
    or ``(rank, None)`` if the system is inconsistent.
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    k = len(rhs)
    aug = [list(matrix[i]) + [rhs[j][i] for j in range(k)] for i in range(nrows)]
    full, pivots = _echelon(aug, ncols)
    rk = len(pivots)
    # rows past the pivots vanish on the coefficient columns; a nonzero
    # right-hand side there means the system is inconsistent
    if any(any(row[ncols:]) for row in full[rk:]):
        return rk, None
    m = [_normalized(full[i], c) for i, c in enumerate(pivots)]
    sols = []
    for j in range(k):
        x = [Fraction(0)] * ncols
        for i, p in enumerate(pivots):
            x[p] = m[i][ncols + j]
        sols.append(tuple(x))
    return rk, sols


def column_hnf(rows: Sequence[Sequence[int]], ncols: int):
    """Column-style Hermite reduction of an integer matrix.

    Returns ``(rank, U)`` with ``U`` unimodular (list of columns) such that
    ``rows @ U`` has nonzero entries only in its first ``rank`` columns.
    The first ``rank`` columns of ``U`` span a lattice complement of the
    integer kernel, the remaining columns a basis of the integer kernel.
    """
    a = [list(r) for r in rows]
    # columns of U, each a list of length ncols
    u = [[int(i == j) for i in range(ncols)] for j in range(ncols)]

    def colop(dst, src, k):
        # column dst += k * column src
        for row in a:
            row[dst] += k * row[src]
        ud, us = u[dst], u[src]
        for i in range(ncols):
            ud[i] += k * us[i]

    def swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        u[i], u[j] = u[j], u[i]

    rk = 0
    for row in a:
        if rk == ncols:
            break
        # gcd-reduce entries rk.. of this row into column rk
        while True:
            nz = [j for j in range(rk, ncols) if row[j] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda j: abs(row[j]))
            if piv != rk:
                swap(piv, rk)
            done = True
            for j in range(rk + 1, ncols):
                if row[j] != 0:
                    q = row[j] // row[rk]
                    colop(j, rk, -q)
                    if row[j] != 0:
                        done = False
            if done:
                break
        if row[rk] != 0:
            if row[rk] < 0:
                for r2 in a:
                    r2[rk] = -r2[rk]
                u[rk] = [-x for x in u[rk]]
            rk += 1
    return rk, [tuple(c) for c in u]
