"""Homological operator L_A and its exact spectral bookkeeping.

For a linear part A and a homogeneous polynomial map f of degree k,

    L_A f (x) = Df(x) A x - A f(x).

The operator preserves the degree, and with the weighted monomial inner
product its adjoint is L_{A^t}.  The normal form complement at degree k is
ker(L_{A^t}) and the removable part is range(L_A); the two are orthogonal
and span the whole space, which `split` verifies exactly on every call.

Jordan-Chevalley helpers (`jordan_split`, `validate_split`) supply the
semisimple/nilpotent decomposition used for equivariance certificates, with
semisimplicity tested through the squarefree part of the characteristic
polynomial annihilating the candidate matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from . import ratmat
from .innerprod import inner_product, map_gram_diagonal
from .polyalg import (
    HomPoly,
    HomPolyMap,
    map_coords,
    monomial_basis,
    multiply,
    partial_derivative,
    vf_basis,
)
from .ratmat import Matrix, mat, nullspace, rref, transpose


@dataclass(frozen=True)
class OperatorMatrix:
    """Exact matrix of a linear operator between monomial-map bases."""

    entries: Matrix
    domain_basis: tuple
    codomain_basis: tuple

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0


@dataclass(frozen=True)
class Splitting:
    """Degree-k splitting H^k = range(L_A) + ker(L_{A^t}), orthogonal and exact."""

    degree: int
    range_basis: Tuple[HomPolyMap, ...]
    complement_basis: Tuple[HomPolyMap, ...]
    preimages: Tuple[HomPolyMap, ...]  # aligned with range_basis


@dataclass(frozen=True)
class SplitReport:
    """Named checks for a claimed Jordan-Chevalley decomposition A = A_s + A_n."""

    sum_ok: bool
    commute_ok: bool
    nilpotent_ok: bool
    semisimple_ok: bool

    @property
    def ok(self) -> bool:
        return self.sum_ok and self.commute_ok and self.nilpotent_ok and self.semisimple_ok

    def failures(self) -> List[str]:
        out = []
        if not self.sum_ok:
            out.append("A_s + A_n != A")
        if not self.commute_ok:
            out.append("A_s and A_n do not commute")
        if not self.nilpotent_ok:
            out.append("A_n is not nilpotent")
        if not self.semisimple_ok:
            out.append("A_s is not semisimple")
        return out


def _square(a) -> Matrix:
    a = mat(a)
    if a and len(a) != len(a[0]):
        raise ValueError("linear part must be a square matrix")
    return a


def lie_derivative(a: Matrix, f: HomPolyMap) -> HomPolyMap:
    """L_A f = Df . (Ax) - A f, exact, degree preserved."""
    a = _square(a)
    n = len(a)
    if f.dim_in != n or f.dim_out != n:
        raise ValueError("f must be a square map matching the matrix dimension")
    # rows of A as linear polynomials (Ax)_j
    ax = HomPolyMap.from_matrix(a, dim_in=n)
    k = f.degree
    comps = []
    for i in range(n):
        acc = HomPoly.zero(n, k)
        for j in range(n):
            if ax.component(j).is_zero:
                continue
            pd = partial_derivative(f.component(i), j)
            if pd.is_zero:
                continue
            acc = acc + multiply(pd, ax.component(j))
        for j in range(n):
            if a[i][j]:
                acc = acc - a[i][j] * f.component(j)
        comps.append(acc)
    return HomPolyMap(comps)


def homological_matrix(a: Matrix, degree: int) -> OperatorMatrix:
    """Matrix of L_A on degree-k maps, columns indexed by vf_basis."""
    a = _square(a)
    n = len(a)
    basis = tuple(vf_basis(n, n, degree))
    columns = [map_coords(lie_derivative(a, b)) for b in basis]
    dim = len(basis)
    entries = tuple(tuple(columns[j][i] for j in range(dim)) for i in range(dim))
    return OperatorMatrix(entries=entries, domain_basis=basis, codomain_basis=basis)


def adjoint_matrix(a: Matrix, degree: int) -> OperatorMatrix:
    """Matrix of the inner-product adjoint of L_A, which equals L_{A^t}.

    Built both ways (directly as L_{A^t}, and as W^-1 M^t W against the
    Gram diagonal) and cross-checked entry by entry; a mismatch is an
    internal hard failure, never a warning.
    """
    a = _square(a)
    n = len(a)
    m = homological_matrix(a, degree)
    direct = homological_matrix(transpose(a), degree)
    w = map_gram_diagonal(n, n, degree)
    dim = len(w)
    conjugated = tuple(
        tuple(m.entries[j][i] * w[j] / w[i] for j in range(dim)) for i in range(dim)
    )
    if conjugated != direct.entries:
        raise RuntimeError(
            "adjoint cross-check failed: W^-1 M^t W does not equal the matrix of L_{A^t}"
        )
    return direct


def kernel_basis(m: OperatorMatrix) -> List[HomPolyMap]:
    """Deterministic kernel basis, expanded in the operator's domain basis."""
    vectors = nullspace(m.entries)
    out = []
    for v in vectors:
        acc = None
        for c, b in zip(v, m.domain_basis):
            if not c:
                continue
            term = c * b
            acc = term if acc is None else acc + term
        if acc is None:
            first = m.domain_basis[0]
            acc = HomPolyMap.zero(first.dim_in, first.dim_out, first.degree)
        out.append(acc)
    return out


def split(a: Matrix, degree: int) -> Splitting:
    """Exact splitting of degree-k maps into range(L_A) and ker(L_{A^t}).

    Verifies rank-nullity, kernel membership of every complement element,
    and pairwise orthogonality of range and complement before returning.
    """
    a = _square(a)
    m = homological_matrix(a, degree)
    mstar = adjoint_matrix(a, degree)
    complement = kernel_basis(mstar)
    _, pivots = rref(m.entries)
    range_basis = [lie_derivative(a, m.domain_basis[j]) for j in pivots]
    preimages = [m.domain_basis[j] for j in pivots]

    dim = m.cols
    if len(range_basis) + len(complement) != dim:
        raise RuntimeError(
            f"splitting failed rank-nullity at degree {degree}: "
            f"{len(range_basis)} + {len(complement)} != {dim}"
        )
    at = transpose(a)
    for c in complement:
        if not lie_derivative(at, c).is_zero:
            raise RuntimeError("complement element is not killed by L_{A^t}")
    for r in range_basis:
        for c in complement:
            if inner_product(r, c) != 0:
                raise RuntimeError("range and complement are not orthogonal")
    return Splitting(
        degree=degree,
        range_basis=tuple(range_basis),
        complement_basis=tuple(complement),
        preimages=tuple(preimages),
    )


def resonant_kernel_basis(eigenvalues: Sequence, degree: int) -> List[HomPolyMap]:
    """Resonance oracle for diagonal A = diag(lambda).

    x^l e_j belongs to the kernel of L_{A^t} = L_A exactly when
    <l, lambda> = lambda_j.  Enumerated in vf_basis order.
    """
    lam = [ratmat.as_fraction(x) for x in eigenvalues]
    n = len(lam)
    out = []
    for j in range(n):
        for mi in monomial_basis(n, degree):
            if sum((Fraction(e) * l for e, l in zip(mi, lam)), Fraction(0)) == lam[j]:
                comps = [HomPoly.zero(n, degree) for _ in range(n)]
                comps[j] = HomPoly.monomial(mi)
                out.append(HomPolyMap(comps))
    return out


def jordan_split(a: Matrix) -> Tuple[Matrix, Matrix]:
    """Jordan-Chevalley split of a matrix already in Jordan form.

    Takes A_s = diagonal part and A_n = strictly upper part and validates
    A = A_s + A_n, commutation, and A_n^n = 0.  Anything else (including
    real Jordan blocks for complex eigenvalues) is rejected; the caller can
    still supply an explicit split through validate_split.
    """
    a = _square(a)
    n = len(a)
    a_s = tuple(
        tuple(a[i][j] if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )
    a_n = tuple(
        tuple(a[i][j] if j > i else Fraction(0) for j in range(n)) for i in range(n)
    )
    if ratmat.mat_add(a_s, a_n) != a:
        raise ValueError("matrix is not upper triangular; not in Jordan form")
    if ratmat.mat_mul(a_s, a_n) != ratmat.mat_mul(a_n, a_s):
        raise ValueError("diagonal and strictly-upper parts do not commute; not in Jordan form")
    if not ratmat.is_zero_matrix(ratmat.mat_pow(a_n, n)):
        raise ValueError("strictly-upper part is not nilpotent; not in Jordan form")
    return a_s, a_n


def validate_split(a: Matrix, a_s: Matrix, a_n: Matrix) -> SplitReport:
    """Check a claimed decomposition A = A_s + A_n (semisimple + nilpotent).

    Semisimplicity of A_s is decided exactly: the squarefree part of its
    characteristic polynomial must annihilate it.
    """
    a, a_s, a_n = _square(a), _square(a_s), _square(a_n)
    n = len(a)
    if len(a_s) != n or len(a_n) != n:
        raise ValueError("split parts must match the dimension of A")
    sum_ok = ratmat.mat_add(a_s, a_n) == a
    commute_ok = ratmat.mat_mul(a_s, a_n) == ratmat.mat_mul(a_n, a_s)
    nilpotent_ok = ratmat.is_zero_matrix(ratmat.mat_pow(a_n, n))
    radical = ratmat.squarefree_part(ratmat.charpoly(a_s))
    semisimple_ok = ratmat.is_zero_matrix(ratmat.poly_eval_matrix(radical, a_s))
    return SplitReport(
        sum_ok=sum_ok,
        commute_ok=commute_ok,
        nilpotent_ok=nilpotent_ok,
        semisimple_ok=semisimple_ok,
    )
