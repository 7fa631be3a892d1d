"""Weighted monomial inner product on homogeneous polynomial spaces.

For scalar homogeneous polynomials p = sum_m p_m x^m and q = sum_m q_m x^m,

    <p, q> = sum_m  m! * p_m * q_m,        m! = prod_i (m_i)!

and for vector-valued maps the component inner products are summed.  With
this weighting, composition with a linear map T on one side matches
composition with T^t on the other, which is what makes the adjoint of the
homological operator computable by transposing its matrix against the Gram
diagonal.

All projections here are solved with exact normal equations; nothing is
orthonormalized, so every intermediate stays rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import List, Sequence, Tuple

from . import ratmat
from .polyalg import (
    HomPoly,
    HomPolyMap,
    MultiIndex,
    map_coords,
    map_from_coords,
    monomial_basis,
)


@dataclass(frozen=True)
class GramWeight:
    """Weight m! attached to one monomial of the inner product's Gram diagonal."""

    multi_index: MultiIndex
    weight: int

    @classmethod
    def of(cls, mi: Sequence[int]) -> "GramWeight":
        mi = tuple(mi)
        w = 1
        for e in mi:
            w *= factorial(e)
        return cls(mi, w)


def monomial_weight(mi: Sequence[int]) -> int:
    w = 1
    for e in mi:
        w *= factorial(e)
    return w


def gram_diagonal(n_vars: int, degree: int) -> List[int]:
    """Gram weights m! aligned with monomial_basis(n_vars, degree)."""
    return [monomial_weight(mi) for mi in monomial_basis(n_vars, degree)]


def map_gram_diagonal(dim_in: int, dim_out: int, degree: int) -> List[int]:
    """Gram weights aligned with vf_basis(dim_in, dim_out, degree)."""
    base = gram_diagonal(dim_in, degree)
    return base * dim_out


def inner_product_scalar(p: HomPoly, q: HomPoly) -> Fraction:
    if p.n_vars != q.n_vars or p.degree != q.degree:
        raise ValueError("inner product needs matching variables and degree")
    small, large = (p, q) if len(p.terms) <= len(q.terms) else (q, p)
    total = Fraction(0)
    for mi, a in small.items():
        b = large.coeff(mi)
        if b:
            total += monomial_weight(mi) * a * b
    return total


def inner_product(p: HomPolyMap, q: HomPolyMap) -> Fraction:
    if p.dim_in != q.dim_in or p.dim_out != q.dim_out or p.degree != q.degree:
        raise ValueError("inner product needs maps of identical shape")
    return sum(
        (inner_product_scalar(a, b) for a, b in zip(p.components, q.components)),
        Fraction(0),
    )


def project_coords(
    v: Sequence[Fraction],
    basis_vectors: Sequence[Sequence[Fraction]],
    weights: Sequence[int],
) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
    """Split coordinates v = v_in + v_perp against span(basis_vectors).

    Exact normal equations under the diagonal Gram weights.  Raises if the
    claimed basis is linearly dependent (singular Gram matrix).
    """
    if not basis_vectors:
        zero = tuple(Fraction(0) for _ in v)
        return zero, tuple(v)
    gram = ratmat.mat(
        [
            [
                sum(a * w * b for a, w, b in zip(bi, weights, bj))
                for bj in basis_vectors
            ]
            for bi in basis_vectors
        ]
    )
    rhs = [sum(a * w * x for a, w, x in zip(bi, weights, v)) for bi in basis_vectors]
    if ratmat.rank(gram) != len(basis_vectors):
        raise ValueError("projection subspace basis is linearly dependent")
    coeffs = ratmat.solve(gram, rhs)
    assert coeffs is not None
    v_in = [Fraction(0)] * len(v)
    for c, bi in zip(coeffs, basis_vectors):
        if c:
            for idx, entry in enumerate(bi):
                if entry:
                    v_in[idx] += c * entry
    v_perp = tuple(x - y for x, y in zip(v, v_in))
    return tuple(v_in), v_perp


def project_orthogonal(
    v: HomPolyMap, subspace: Sequence[HomPolyMap]
) -> Tuple[HomPolyMap, HomPolyMap]:
    """Orthogonal decomposition v = v_in + v_perp with v_in in span(subspace)."""
    for s in subspace:
        if s.dim_in != v.dim_in or s.dim_out != v.dim_out or s.degree != v.degree:
            raise ValueError("subspace elements must match the shape of v")
    weights = map_gram_diagonal(v.dim_in, v.dim_out, v.degree)
    vin, vperp = project_coords(map_coords(v), [map_coords(s) for s in subspace], weights)
    return (
        map_from_coords(v.dim_in, v.dim_out, v.degree, vin),
        map_from_coords(v.dim_in, v.dim_out, v.degree, vperp),
    )
