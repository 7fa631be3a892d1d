"""Sparse multivariate polynomial algebra over the rationals.

A monomial is a multi-index: a tuple of non-negative integer exponents, one
per variable.  A homogeneous polynomial (HomPoly) stores a mapping
multi-index -> Fraction with all multi-indices of the same total degree;
zero coefficients are never stored.  A HomPolyMap is a vector of HomPoly
components sharing variables and degree, and a PolySeries collects graded
HomPolyMap terms of degrees 2..max_degree.

The monomial order used everywhere (iteration, bases, rendering) is graded
lexicographic: compare total degree first, then exponent tuples with the
first variable strongest, descending.  For two variables at degree 2 this
lists (2,0), (1,1), (0,2).

Key entry points: monomial_basis, vf_basis, partial_derivative, multiply,
compose_truncated, evaluate.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .ratmat import Matrix, as_fraction

MultiIndex = Tuple[int, ...]


def grlex_key(mi: MultiIndex):
    return (sum(mi), tuple(-e for e in mi))


def monomial_basis(n_vars: int, degree: int) -> List[MultiIndex]:
    """All multi-indices of the given total degree, in graded-lex order."""
    if n_vars < 1:
        raise ValueError("need at least one variable")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if n_vars == 1:
        return [(degree,)]
    out = []
    for e in range(degree, -1, -1):
        for rest in monomial_basis(n_vars - 1, degree - e):
            out.append((e,) + rest)
    return out


def _validate_index(mi, n_vars: int, degree: int) -> MultiIndex:
    mi = tuple(mi)
    if len(mi) != n_vars:
        raise ValueError(f"multi-index {mi} has {len(mi)} entries, expected {n_vars}")
    if any(not isinstance(e, int) or isinstance(e, bool) or e < 0 for e in mi):
        raise ValueError(f"multi-index {mi} must hold non-negative integers")
    if sum(mi) != degree:
        raise ValueError(f"multi-index {mi} has degree {sum(mi)}, expected {degree}")
    return mi


class HomPoly:
    """Homogeneous polynomial in n_vars variables, exact rational coefficients."""

    __slots__ = ("n_vars", "degree", "terms")

    def __init__(self, n_vars: int, degree: int, terms: Optional[Mapping] = None):
        if n_vars < 1:
            raise ValueError("need at least one variable")
        if degree < 0:
            raise ValueError("degree must be non-negative")
        self.n_vars = n_vars
        self.degree = degree
        clean: Dict[MultiIndex, Fraction] = {}
        if terms:
            for mi, cf in terms.items():
                mi = _validate_index(mi, n_vars, degree)
                cf = as_fraction(cf)
                if cf:
                    clean[mi] = cf
        self.terms = dict(sorted(clean.items(), key=lambda kv: grlex_key(kv[0])))

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n_vars: int, degree: int) -> "HomPoly":
        return cls(n_vars, degree)

    @classmethod
    def monomial(cls, mi: Sequence[int], coeff=1) -> "HomPoly":
        mi = tuple(mi)
        return cls(len(mi), sum(mi), {mi: coeff})

    @classmethod
    def variable(cls, n_vars: int, index: int) -> "HomPoly":
        mi = tuple(1 if i == index else 0 for i in range(n_vars))
        return cls(n_vars, 1, {mi: 1})

    # -- queries -------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, mi: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(mi), Fraction(0))

    def items(self) -> Iterator[Tuple[MultiIndex, Fraction]]:
        return iter(self.terms.items())

    # -- arithmetic ----------------------------------------------------------

    def _check_compatible(self, other: "HomPoly"):
        if self.n_vars != other.n_vars or self.degree != other.degree:
            raise ValueError(
                f"incompatible polynomials: ({self.n_vars} vars, degree {self.degree}) "
                f"vs ({other.n_vars} vars, degree {other.degree})"
            )

    def __add__(self, other: "HomPoly") -> "HomPoly":
        self._check_compatible(other)
        out = dict(self.terms)
        for mi, cf in other.terms.items():
            out[mi] = out.get(mi, Fraction(0)) + cf
        return HomPoly(self.n_vars, self.degree, out)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        return self + (-other)

    def __neg__(self) -> "HomPoly":
        return HomPoly(self.n_vars, self.degree, {mi: -cf for mi, cf in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, HomPoly):
            return multiply(self, other)
        c = as_fraction(other)
        return HomPoly(self.n_vars, self.degree, {mi: c * cf for mi, cf in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HomPoly)
            and self.n_vars == other.n_vars
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        if self.is_zero:
            return f"HomPoly<0; {self.n_vars} vars, deg {self.degree}>"
        body = " + ".join(f"{cf}*x^{mi}" for mi, cf in self.terms.items())
        return f"HomPoly<{body}>"


def partial_derivative(p: HomPoly, var: int) -> HomPoly:
    """d p / d x_var; the degree drops by one (result degree max(k-1, 0))."""
    if not 0 <= var < p.n_vars:
        raise ValueError(f"variable index {var} out of range for {p.n_vars} variables")
    new_degree = max(p.degree - 1, 0)
    out: Dict[MultiIndex, Fraction] = {}
    for mi, cf in p.terms.items():
        e = mi[var]
        if e == 0:
            continue
        dm = mi[:var] + (e - 1,) + mi[var + 1 :]
        out[dm] = out.get(dm, Fraction(0)) + cf * e
    return HomPoly(p.n_vars, new_degree, out)


def multiply(p: HomPoly, q: HomPoly) -> HomPoly:
    """Product of homogeneous polynomials; degrees add."""
    if p.n_vars != q.n_vars:
        raise ValueError("operands live in different variable sets")
    out: Dict[MultiIndex, Fraction] = {}
    for mi, a in p.terms.items():
        for mj, b in q.terms.items():
            mk = tuple(x + y for x, y in zip(mi, mj))
            out[mk] = out.get(mk, Fraction(0)) + a * b
    return HomPoly(p.n_vars, p.degree + q.degree, out)


def evaluate(p: HomPoly, point: Sequence) -> Fraction:
    """Exact evaluation at a rational point."""
    point = [as_fraction(x) for x in point]
    if len(point) != p.n_vars:
        raise ValueError(f"point has {len(point)} coordinates, expected {p.n_vars}")
    total = Fraction(0)
    for mi, cf in p.terms.items():
        v = cf
        for x, e in zip(point, mi):
            if e:
                v *= x**e
        total += v
    return total


def compose_linear(p: HomPoly, t: Matrix) -> HomPoly:
    """p(T x): substitute each variable with a linear form; degree preserved."""
    nrows = len(t)
    if nrows != p.n_vars:
        raise ValueError("matrix row count must match the variable count of p")
    ncols = len(t[0]) if nrows else 0
    forms = [
        HomPoly(ncols, 1, {tuple(1 if j == c else 0 for j in range(ncols)): t[r][c] for c in range(ncols)})
        for r in range(nrows)
    ]
    out = HomPoly.zero(ncols, p.degree)
    for mi, cf in p.terms.items():
        acc = HomPoly(ncols, 0, {(0,) * ncols: 1})
        for var, e in enumerate(mi):
            for _ in range(e):
                acc = multiply(acc, forms[var])
        out = out + cf * acc
    return out


def substitute_zero(p: HomPoly, var_indices: Iterable[int]) -> HomPoly:
    """Set the listed variables to zero: drop every monomial touching them."""
    idx = set(var_indices)
    kept = {mi: cf for mi, cf in p.terms.items() if all(mi[i] == 0 for i in idx)}
    return HomPoly(p.n_vars, p.degree, kept)


def directional_derivative(field: Sequence[HomPoly], p: HomPoly) -> HomPoly:
    """sum_j field_j * dp/dx_j for a polynomial vector field."""
    if len(field) != p.n_vars:
        raise ValueError("field must have one component per variable of p")
    fdeg = None
    for f in field:
        if not f.is_zero:
            fdeg = f.degree
            break
    if fdeg is None:
        # an all-zero field still knows its degree; keep the result exact
        fdeg = field[0].degree
    out = HomPoly.zero(p.n_vars, max(p.degree - 1, 0) + fdeg)
    for j, fj in enumerate(field):
        if fj.is_zero:
            continue
        pd = partial_derivative(p, j)
        if pd.is_zero:
            continue
        out = out + multiply(pd, fj)
    return out


class HomPolyMap:
    """Vector of HomPoly components: a homogeneous polynomial map R^a -> R^b."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[HomPoly]):
        components = tuple(components)
        if not components:
            raise ValueError("a map needs at least one component")
        n, k = components[0].n_vars, components[0].degree
        for c in components:
            if c.n_vars != n or c.degree != k:
                raise ValueError("all components must share variables and degree")
        self.components = components

    @classmethod
    def zero(cls, dim_in: int, dim_out: int, degree: int) -> "HomPolyMap":
        return cls([HomPoly.zero(dim_in, degree) for _ in range(dim_out)])

    @classmethod
    def from_matrix(cls, a: Matrix, dim_in: Optional[int] = None) -> "HomPolyMap":
        """The linear map x -> A x as a degree-1 HomPolyMap."""
        ncols = dim_in if dim_in is not None else (len(a[0]) if a else 0)
        comps = []
        for row in a:
            terms = {}
            for j, cf in enumerate(row):
                if cf:
                    terms[tuple(1 if i == j else 0 for i in range(ncols))] = cf
            comps.append(HomPoly(ncols, 1, terms))
        return cls(comps)

    @property
    def dim_in(self) -> int:
        return self.components[0].n_vars

    @property
    def dim_out(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return self.components[0].degree

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def component(self, i: int) -> HomPoly:
        return self.components[i]

    def __add__(self, other: "HomPolyMap") -> "HomPolyMap":
        return HomPolyMap([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "HomPolyMap") -> "HomPolyMap":
        return HomPolyMap([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "HomPolyMap":
        return HomPolyMap([-c for c in self.components])

    def __mul__(self, other) -> "HomPolyMap":
        c = as_fraction(other)
        return HomPolyMap([c * comp for comp in self.components])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, HomPolyMap) and self.components == other.components

    def __repr__(self) -> str:
        parts = []
        for c in self.components:
            if c.is_zero:
                parts.append("0")
            else:
                parts.append(" + ".join(f"{cf}*x^{mi}" for mi, cf in c.terms.items()))
        return f"HomPolyMap<({'; '.join(parts)}), deg {self.degree}>"


def evaluate_map(m: HomPolyMap, point: Sequence) -> Tuple[Fraction, ...]:
    return tuple(evaluate(c, point) for c in m.components)


def vf_basis(dim_in: int, dim_out: int, degree: int) -> List[HomPolyMap]:
    """Monomial vector-field basis x^l e_j, ordered by (component j, graded-lex l)."""
    mons = monomial_basis(dim_in, degree)
    out = []
    for j in range(dim_out):
        for mi in mons:
            comps = [HomPoly.zero(dim_in, degree) for _ in range(dim_out)]
            comps[j] = HomPoly.monomial(mi)
            out.append(HomPolyMap(comps))
    return out


def map_coords(m: HomPolyMap) -> List[Fraction]:
    """Coordinates of a map in the vf_basis order."""
    mons = monomial_basis(m.dim_in, m.degree)
    out = []
    for j in range(m.dim_out):
        comp = m.components[j]
        out.extend(comp.coeff(mi) for mi in mons)
    return out


def map_from_coords(dim_in: int, dim_out: int, degree: int, coords: Sequence) -> HomPolyMap:
    mons = monomial_basis(dim_in, degree)
    if len(coords) != dim_out * len(mons):
        raise ValueError("coordinate vector has the wrong length")
    comps = []
    for j in range(dim_out):
        block = coords[j * len(mons) : (j + 1) * len(mons)]
        comps.append(HomPoly(dim_in, degree, dict(zip(mons, block))))
    return HomPolyMap(comps)


class PolySeries:
    """Graded nonlinear terms of a polynomial map: degrees 2..max_degree."""

    __slots__ = ("dim_in", "dim_out", "max_degree", "terms")

    def __init__(
        self,
        dim_in: int,
        dim_out: int,
        max_degree: int,
        terms: Optional[Mapping[int, HomPolyMap]] = None,
    ):
        if max_degree < 1:
            raise ValueError("max_degree must be at least 1")
        self.dim_in = dim_in
        self.dim_out = dim_out
        self.max_degree = max_degree
        clean: Dict[int, HomPolyMap] = {}
        if terms:
            for k, t in terms.items():
                if not 2 <= k <= max_degree:
                    raise ValueError(f"term of degree {k} outside 2..{max_degree}")
                if t.degree != k or t.dim_in != dim_in or t.dim_out != dim_out:
                    raise ValueError(f"term at degree {k} has mismatched shape")
                if not t.is_zero:
                    clean[k] = t
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def zero(cls, dim_in: int, dim_out: int, max_degree: int) -> "PolySeries":
        return cls(dim_in, dim_out, max_degree)

    def term(self, k: int) -> HomPolyMap:
        if k in self.terms:
            return self.terms[k]
        return HomPolyMap.zero(self.dim_in, self.dim_out, k)

    def degrees(self) -> List[int]:
        return sorted(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def with_term(self, k: int, t: HomPolyMap) -> "PolySeries":
        new = dict(self.terms)
        if t.is_zero:
            new.pop(k, None)
        else:
            new[k] = t
        return PolySeries(self.dim_in, self.dim_out, self.max_degree, new)

    def truncate(self, order: int) -> "PolySeries":
        return PolySeries(
            self.dim_in, self.dim_out, order, {k: t for k, t in self.terms.items() if k <= order}
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolySeries)
            and self.dim_in == other.dim_in
            and self.dim_out == other.dim_out
            and self.max_degree == other.max_degree
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"PolySeries<{self.dim_in}->{self.dim_out}, degrees {self.degrees()}, N={self.max_degree}>"


# ---------------------------------------------------------------------------
# truncated composition
# ---------------------------------------------------------------------------

_Graded = Dict[int, HomPoly]  # scalar polynomial split into homogeneous layers


def _graded_add(a: _Graded, b: _Graded) -> _Graded:
    out = dict(a)
    for d, p in b.items():
        out[d] = out[d] + p if d in out else p
    return {d: p for d, p in out.items() if not p.is_zero}


def _graded_scale(c: Fraction, a: _Graded) -> _Graded:
    return {d: c * p for d, p in a.items() if c}


def _graded_mul(a: _Graded, b: _Graded, order: int) -> _Graded:
    out: _Graded = {}
    for da, pa in a.items():
        for db, pb in b.items():
            d = da + db
            if d > order:
                continue
            prod = multiply(pa, pb)
            out[d] = out[d] + prod if d in out else prod
    return {d: p for d, p in out.items() if not p.is_zero}


def compose_truncated(
    linear: Matrix, series: PolySeries, phi: PolySeries, order: int
) -> PolySeries:
    """Nonlinear part of f(phi(y)) truncated at the given order.

    f is the map with the given linear part and graded nonlinear series;
    phi is a near-identity transformation (identity linear part implied, its
    nonlinear layers given as a PolySeries with dim_in == dim_out).  The
    linear part of the composition equals `linear` and is not returned.
    """
    if phi.dim_in != phi.dim_out:
        raise ValueError("phi must be a square near-identity map")
    a = phi.dim_out  # = dim_in of f
    if series.dim_in != a:
        raise ValueError("series input dimension must match phi output dimension")
    nrows = len(linear)
    if nrows != series.dim_out or (linear and len(linear[0]) != a):
        raise ValueError("linear part shape must match the series")

    # each phi component as graded layers, with the identity at degree 1
    phi_layers: List[_Graded] = []
    for j in range(a):
        layers: _Graded = {1: HomPoly.variable(a, j)}
        for k in phi.degrees():
            comp = phi.term(k).component(j)
            if not comp.is_zero:
                layers[k] = comp
        phi_layers.append(layers)

    # powers cache: powers[j][e] = (phi_j)^e as graded layers
    one: _Graded = {0: HomPoly(a, 0, {(0,) * a: 1})}
    powers: List[List[_Graded]] = [[one] for _ in range(a)]

    def power(j: int, e: int) -> _Graded:
        cache = powers[j]
        while len(cache) <= e:
            cache.append(_graded_mul(cache[-1], phi_layers[j], order))
        return cache[e]

    result: List[_Graded] = []
    for i in range(nrows):
        acc: _Graded = {}
        for j in range(a):
            cf = linear[i][j]
            if cf:
                acc = _graded_add(acc, _graded_scale(as_fraction(cf), phi_layers[j]))
        for k in series.degrees():
            comp = series.term(k).component(i)
            for mi, cf in comp.items():
                prod = one
                for j, e in enumerate(mi):
                    if e:
                        prod = _graded_mul(prod, power(j, e), order)
                acc = _graded_add(acc, _graded_scale(cf, prod))
        result.append(acc)

    out_terms: Dict[int, HomPolyMap] = {}
    for d in range(2, order + 1):
        comps = [acc.get(d, HomPoly.zero(a, d)) for acc in result]
        m = HomPolyMap(comps) if comps else None
        if m is not None and not m.is_zero:
            out_terms[d] = m
    return PolySeries(a, nrows, order, out_terms)
