"""Exact linear algebra over the rationals.

Dense matrices are tuples of tuples of Fraction.  Everything here is
deterministic: row echelon reduction always picks the leftmost pivot column
and the topmost nonzero row, kernel bases enumerate free columns in
ascending order, and particular solutions set free variables to zero.

The characteristic polynomial is computed with the Faddeev-LeVerrier
recurrence, which stays in exact rational arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence, Tuple

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]


def as_fraction(value) -> Fraction:
    """Coerce int / str / Fraction to Fraction.  Floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a rational coefficient")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(
        f"expected an exact rational (int, str or Fraction), got {type(value).__name__}; "
        "floating point input is rejected, not rounded"
    )


def vec(entries: Sequence) -> Vector:
    return tuple(as_fraction(x) for x in entries)


def mat(rows: Sequence[Sequence]) -> Matrix:
    out = tuple(vec(row) for row in rows)
    if out and any(len(row) != len(out[0]) for row in out):
        raise ValueError("ragged matrix")
    return out


def identity(n: int) -> Matrix:
    one, zero = Fraction(1), Fraction(0)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def zeros(nrows: int, ncols: int) -> Matrix:
    zero = Fraction(0)
    return tuple((zero,) * ncols for _ in range(nrows))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a: Matrix) -> Matrix:
    c = as_fraction(c)
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def mat_pow(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def is_zero_matrix(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def rref(m: Matrix) -> Tuple[Matrix, Tuple[int, ...]]:
    """Reduced row echelon form and the pivot column indices.

    Leftmost pivot selection; rows are fully reduced (zeros above and below
    each pivot) so the result is canonical for a given row space.
    """
    rows = [list(r) for r in m]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        prow = rows[r]
        inv = prow[c]
        if inv != 1:
            for j in range(c, ncols):
                if prow[j]:
                    prow[j] /= inv
        support = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                row = rows[i]
                for j in support:
                    row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in rows), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def nullspace(m: Matrix) -> Tuple[Vector, ...]:
    """Deterministic kernel basis: one vector per free column, in column order."""
    if not m:
        return ()
    red, pivots = rref(m)
    ncols = len(m[0])
    pivot_set = set(pivots)
    zero, one = Fraction(0), Fraction(1)
    basis = []
    for fc in range(ncols):
        if fc in pivot_set:
            continue
        v = [zero] * ncols
        v[fc] = one
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][fc]
        basis.append(tuple(v))
    return tuple(basis)


def solve(m: Matrix, b: Sequence[Fraction]) -> Optional[Vector]:
    """A particular solution of m x = b (free variables zero), or None."""
    if not m:
        return () if all(x == 0 for x in b) else None
    ncols = len(m[0])
    aug = tuple(row + (bi,) for row, bi in zip(m, b))
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][ncols]
    return tuple(x)


# ---------------------------------------------------------------------------
# univariate polynomials over Q, as ascending coefficient tuples
# ---------------------------------------------------------------------------


def poly_trim(c: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_deriv(c: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    if len(c) <= 1:
        return (Fraction(0),)
    return tuple(Fraction(i) * c[i] for i in range(1, len(c)))


def poly_divmod(a, b):
    a = list(poly_trim(a))
    b = poly_trim(b)
    if b == (Fraction(0),):
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and poly_trim(a) != (Fraction(0),):
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        q[shift] = f
        for i, bi in enumerate(b):
            a[shift + i] -= f * bi
        a = list(poly_trim(a))
        if len(a) < len(b):
            break
    return poly_trim(q), poly_trim(a)


def poly_gcd(a, b) -> Tuple[Fraction, ...]:
    """Monic gcd over Q."""
    a, b = poly_trim(a), poly_trim(b)
    while b != (Fraction(0),):
        _, r = poly_divmod(a, b)
        a, b = b, r
    if a == (Fraction(0),):
        return a
    lead = a[-1]
    return tuple(x / lead for x in a)


def squarefree_part(c) -> Tuple[Fraction, ...]:
    """c / gcd(c, c'), monic: the radical of a polynomial over Q."""
    c = poly_trim(c)
    g = poly_gcd(c, poly_deriv(c))
    q, r = poly_divmod(c, g)
    if r != (Fraction(0),):
        raise ArithmeticError("gcd did not divide its argument")
    lead = q[-1]
    return tuple(x / lead for x in q)


def poly_eval_matrix(c, a: Matrix) -> Matrix:
    """Evaluate a univariate polynomial at a square matrix (Horner)."""
    n = len(a)
    c = poly_trim(c)
    out = mat_scale(c[-1], identity(n))
    for k in range(len(c) - 2, -1, -1):
        out = mat_add(mat_mul(out, a), mat_scale(c[k], identity(n)))
    return out


def charpoly(a: Matrix) -> Tuple[Fraction, ...]:
    """Characteristic polynomial det(tI - A), ascending coefficients, monic.

    Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I,
    c_{n-k} = -tr(A M_k) / k.
    """
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = zeros(n, n)
    for k in range(1, n + 1):
        mk = mat_add(mat_mul(a, mk), mat_scale(coeffs[n - k + 1], identity(n)))
        coeffs[n - k] = -trace(mat_mul(a, mk)) / k
    return tuple(coeffs)
