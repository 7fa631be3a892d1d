"""Degree-by-degree normalization of x' = A x + f(x) near the origin.

Coordinate changes are time-1 flows of homogeneous polynomial generators.
Pushing the field through such a flow is the Lie series

    g = sum_j (ad_xi)^j F / j!,      ad_xi h = Dh.xi - Dxi.h,

which terminates at any fixed truncation order because ad_xi raises the
degree by deg(xi) - 1 >= 1.  At degree k the new term is
g^[k] = f^[k] - L_A xi^[k], so solving the homological equation against the
orthogonal splitting leaves exactly the ker(L_{A^t}) component.

Every report carries machine-checkable certificates: the residual of the
homological equation, kernel membership of each normal form term,
equivariance under the semisimple/nilpotent parts when a Jordan-Chevalley
split is available, and conjugacy residuals computed along two independent
routes (re-applied Lie series, and the flow-map composition identity
DPhi(y).g(y) = f(Phi(y))).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .homological import (
    adjoint_matrix,
    homological_matrix,
    jordan_split,
    kernel_basis,
    lie_derivative,
    validate_split,
)
from .innerprod import inner_product, map_gram_diagonal, project_coords, project_orthogonal
from .polyalg import (
    HomPolyMap,
    PolySeries,
    compose_truncated,
    directional_derivative,
    map_coords,
    map_from_coords,
)
from .ratmat import Matrix, identity, mat, nullspace, solve, transpose

MatrixPair = Tuple[Matrix, Matrix]


# ---------------------------------------------------------------------------
# Lie series machinery
# ---------------------------------------------------------------------------


def _jac_times(h: HomPolyMap, v: HomPolyMap) -> HomPolyMap:
    """Dh(y) . v(y); degrees add minus one."""
    return HomPolyMap(
        [directional_derivative(v.components, h.component(i)) for i in range(h.dim_out)]
    )


def _ad(xi: HomPolyMap, h: HomPolyMap) -> HomPolyMap:
    """Vector-field bracket ad_xi h = Dh.xi - Dxi.h."""
    return _jac_times(h, xi) - _jac_times(xi, h)


def _id_map(n: int) -> HomPolyMap:
    return HomPolyMap.from_matrix(identity(n), dim_in=n)


def _check_generator(xi: HomPolyMap, n: int):
    if xi.dim_in != n or xi.dim_out != n:
        raise ValueError("generator must be a square map of the system dimension")
    if xi.degree < 2:
        raise ValueError("generator must have degree at least 2")


def pushforward_ode(a: Matrix, f: PolySeries, xi: HomPolyMap, order: int) -> PolySeries:
    """Field of x' = Ax + f(x) in the coordinates x = Phi_xi(y), truncated.

    Phi_xi is the time-1 flow of xi.  The linear part is unchanged (ad_xi
    only produces degrees >= deg(xi)), so only degrees 2..order are returned.
    """
    a = mat(a)
    n = len(a)
    _check_generator(xi, n)
    if f.dim_in != n or f.dim_out != n:
        raise ValueError("nonlinear terms must match the system dimension")

    graded: Dict[int, HomPolyMap] = {1: HomPolyMap.from_matrix(a, dim_in=n)}
    for k in f.degrees():
        if k <= order:
            graded[k] = f.term(k)

    result = dict(graded)
    term = graded
    step = xi.degree - 1
    j = 0
    fact = 1
    while term:
        j += 1
        fact *= j
        nxt: Dict[int, HomPolyMap] = {}
        for d, h in term.items():
            nd = d + step
            if nd > order:
                continue
            adh = _ad(xi, h)
            if adh.is_zero:
                continue
            nxt[nd] = nxt[nd] + adh if nd in nxt else adh
        term = nxt
        for d, h in term.items():
            contrib = Fraction(1, fact) * h
            result[d] = result[d] + contrib if d in result else contrib

    return PolySeries(n, n, order, {d: t for d, t in result.items() if d >= 2})


def flow_map(xi: HomPolyMap, order: int) -> PolySeries:
    """Time-1 flow of the field xi as a near-identity map, truncated.

    Phi(y) = sum_j T^j(id)(y) / j! with T(h) = Dh.xi; the identity linear
    part is implied by the PolySeries convention.
    """
    n = xi.dim_out
    _check_generator(xi, n)
    result: Dict[int, HomPolyMap] = {}
    term: Dict[int, HomPolyMap] = {1: _id_map(n)}
    step = xi.degree - 1
    j = 0
    fact = 1
    while term:
        j += 1
        fact *= j
        nxt: Dict[int, HomPolyMap] = {}
        for d, h in term.items():
            nd = d + step
            if nd > order:
                continue
            th = _jac_times(h, xi)
            if th.is_zero:
                continue
            nxt[nd] = nxt[nd] + th if nd in nxt else th
        term = nxt
        for d, h in term.items():
            contrib = Fraction(1, fact) * h
            result[d] = result[d] + contrib if d in result else contrib
    return PolySeries(n, n, order, result)


def compose_near_identity(first: PolySeries, second: PolySeries, order: int) -> PolySeries:
    """Nonlinear layers of first(second(y)) for near-identity maps."""
    if first.dim_in != first.dim_out or second.dim_in != second.dim_out:
        raise ValueError("near-identity maps must be square")
    if first.dim_in != second.dim_out:
        raise ValueError("composition dimensions do not match")
    n = first.dim_in
    inner = compose_truncated(identity(n), first, second, order)
    # compose_truncated already yields (id + first)(second(y)) minus the
    # linear identity part, which is exactly the graded composition.
    return inner


# ---------------------------------------------------------------------------
# homological equation
# ---------------------------------------------------------------------------


def solve_homological(a: Matrix, fk: HomPolyMap) -> Tuple[HomPolyMap, HomPolyMap]:
    """Split f_k = L_A xi + r with r in ker(L_{A^t}) and xi minimal.

    Returns (xi, r).  The generator xi is the unique solution orthogonal to
    ker(L_A), making the whole computation deterministic.  Both defining
    identities are re-verified exactly before returning.
    """
    a = mat(a)
    n = len(a)
    if fk.dim_in != n or fk.dim_out != n or fk.degree < 2:
        raise ValueError("homological equation needs a square map of degree >= 2")
    k = fk.degree
    m = homological_matrix(a, k)
    mstar = adjoint_matrix(a, k)
    complement = kernel_basis(mstar)
    residual, removable = project_orthogonal(fk, complement)

    coords = solve(m.entries, map_coords(removable))
    if coords is None:
        raise RuntimeError(
            "homological equation is inconsistent: the co-kernel projection "
            "did not land in the range of L_A"
        )
    kern = nullspace(m.entries)
    if kern:
        weights = map_gram_diagonal(n, n, k)
        _, coords = project_coords(coords, kern, weights)
    xi = map_from_coords(n, n, k, coords)

    if lie_derivative(a, xi) != removable:
        raise RuntimeError("homological solve failed verification: L_A xi != f_k - r")
    if not lie_derivative(transpose(a), residual).is_zero:
        raise RuntimeError("homological solve failed verification: r not in ker L_{A^t}")
    return xi, residual


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransformationLog:
    """Nonzero flow generators applied during normalization, by degree."""

    dim: int
    order: int
    generators: Tuple[Tuple[int, HomPolyMap], ...]

    def generator(self, degree: int) -> Optional[HomPolyMap]:
        for d, g in self.generators:
            if d == degree:
                return g
        return None

    def transformation(self) -> PolySeries:
        """Composite near-identity map Phi with x = Phi(y).

        Generators act in increasing degree, so Phi is the composition
        Phi_{xi_2} o Phi_{xi_3} o ... truncated at the log's order.
        """
        phi = PolySeries.zero(self.dim, self.dim, self.order)
        for _, g in self.generators:
            step = flow_map(g, self.order)
            phi = compose_near_identity(phi, step, self.order) if not phi.is_zero else step
        return phi


@dataclass(frozen=True)
class DegreeCertificate:
    """Exact per-degree checks backing one normalization step."""

    degree: int
    space_dim: int
    range_dim: int
    kernel_dim: int
    homological_ok: bool  # L_A xi_k = f_k - g_k at this degree
    kernel_ok: bool  # g_k in ker L_{A^t}
    minimal_ok: bool  # xi_k orthogonal to ker L_A
    semisimple_ok: Optional[bool]  # L_{A_s^t} g_k = 0 (None without a split)
    nilpotent_ok: Optional[bool]  # L_{A_n^t} g_k = 0 (None without a split)

    @property
    def ok(self) -> bool:
        named = [self.homological_ok, self.kernel_ok, self.minimal_ok]
        named += [v for v in (self.semisimple_ok, self.nilpotent_ok) if v is not None]
        return all(named)


@dataclass(frozen=True)
class ConjugacyReport:
    """Two independent conjugacy checks between x' = Ax + f and y' = Ay + g."""

    order: int
    pushforward_residuals: PolySeries  # g - (Lie-series pushforward of f)
    flow_residuals: PolySeries  # DPhi(y).(Ay + g(y)) - (A + f)(Phi(y))

    @property
    def pushforward_ok(self) -> bool:
        return self.pushforward_residuals.is_zero

    @property
    def flow_identity_ok(self) -> bool:
        return self.flow_residuals.is_zero

    @property
    def ok(self) -> bool:
        return self.pushforward_ok and self.flow_identity_ok


@dataclass(frozen=True)
class NormalFormReport:
    """Everything produced by normalize_ode, exact and re-checkable."""

    linear_part: Matrix
    order: int
    original: PolySeries
    normal_form: PolySeries
    log: TransformationLog
    certificates: Tuple[DegreeCertificate, ...]
    conjugacy: ConjugacyReport
    split: Optional[MatrixPair]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.certificates) and self.conjugacy.ok

    def certificate(self, degree: int) -> DegreeCertificate:
        for c in self.certificates:
            if c.degree == degree:
                return c
        raise KeyError(f"no certificate at degree {degree}")


# ---------------------------------------------------------------------------
# conjugacy verification (two routes, kept separate on purpose)
# ---------------------------------------------------------------------------


def pushforward_residuals(
    a: Matrix, f: PolySeries, log: TransformationLog, g: PolySeries, order: int
) -> PolySeries:
    """g minus the field obtained by re-applying every logged flow to f."""
    current = f.truncate(order)
    for _, gen in log.generators:
        current = pushforward_ode(a, current, gen, order)
    n = len(a)
    diff = {
        k: g.term(k) - current.term(k)
        for k in range(2, order + 1)
        if g.term(k) != current.term(k)
    }
    return PolySeries(n, n, order, diff)


def flow_conjugacy_residuals(
    a: Matrix, f: PolySeries, phi: PolySeries, g: PolySeries, order: int
) -> PolySeries:
    """Defect of DPhi(y).(Ay + g(y)) = (A + f)(Phi(y)), degree by degree.

    This route never touches the Lie series: Phi is differentiated and
    composed directly, so it independently witnesses the conjugacy.
    """
    a = mat(a)
    n = len(a)
    if phi.dim_in != n or phi.dim_out != n:
        raise ValueError("phi must be a square near-identity map of the system dimension")

    phi_layers: Dict[int, HomPolyMap] = {1: _id_map(n)}
    for k in phi.degrees():
        if k <= order:
            phi_layers[k] = phi.term(k)
    g_layers: Dict[int, HomPolyMap] = {1: HomPolyMap.from_matrix(a, dim_in=n)}
    for d in g.degrees():
        if d <= order:
            g_layers[d] = g.term(d)

    lhs: Dict[int, HomPolyMap] = {}
    for k, pk in phi_layers.items():
        for d, gd in g_layers.items():
            e = k - 1 + d
            if e > order:
                continue
            piece = _jac_times(pk, gd)
            if piece.is_zero:
                continue
            lhs[e] = lhs[e] + piece if e in lhs else piece

    rhs_series = compose_truncated(a, f.truncate(order), phi, order)
    rhs: Dict[int, HomPolyMap] = {1: HomPolyMap.from_matrix(a, dim_in=n)}
    for d in rhs_series.degrees():
        rhs[d] = rhs_series.term(d)

    if lhs.get(1) != rhs.get(1):
        raise RuntimeError("conjugacy check broke at the linear level; internal error")

    zero_by = {d: HomPolyMap.zero(n, n, d) for d in range(2, order + 1)}
    diff = {}
    for d in range(2, order + 1):
        delta = lhs.get(d, zero_by[d]) - rhs.get(d, zero_by[d])
        if not delta.is_zero:
            diff[d] = delta
    return PolySeries(n, n, order, diff)


def verify_conjugacy(
    a: Matrix, f: PolySeries, log: TransformationLog, g: PolySeries, order: int
) -> ConjugacyReport:
    """Run both conjugacy routes and report their residuals separately."""
    push = pushforward_residuals(a, f, log, g, order)
    phi = log.transformation()
    flow = flow_conjugacy_residuals(a, f, phi, g, order)
    return ConjugacyReport(order=order, pushforward_residuals=push, flow_residuals=flow)


# ---------------------------------------------------------------------------
# the normalizer
# ---------------------------------------------------------------------------


def resolve_split(a: Matrix, split: Optional[MatrixPair]) -> Optional[MatrixPair]:
    """Split to use for equivariance checks: the supplied one (validated) or,
    when A is already in Jordan form, the derived one; None otherwise."""
    if split is not None:
        a_s, a_n = mat(split[0]), mat(split[1])
        report = validate_split(a, a_s, a_n)
        if not report.ok:
            raise ValueError(
                "supplied semisimple/nilpotent split is invalid: "
                + "; ".join(report.failures())
            )
        return a_s, a_n
    try:
        return jordan_split(a)
    except ValueError:
        return None


def normalize_ode(
    a: Matrix, f: PolySeries, order: int, split: Optional[MatrixPair] = None
) -> NormalFormReport:
    """Inner-product normal form of x' = Ax + f(x) through the given order.

    Degree by degree: solve the homological equation, keep only the
    ker(L_{A^t}) component, and push the remaining field forward through the
    time-1 flow of the solved generator.  All certificates are exact; any
    internal inconsistency raises instead of degrading silently.
    """
    a = mat(a)
    n = len(a)
    if n == 0 or len(a[0]) != n:
        raise ValueError("linear part must be a non-empty square matrix")
    if f.dim_in != n or f.dim_out != n:
        raise ValueError("nonlinear terms must match the system dimension")
    if order < 2:
        # nothing to normalize below degree 2: report the system unchanged
        order = 1

    resolved = resolve_split(a, split)
    at = transpose(a)
    current = f.truncate(order)
    generators: List[Tuple[int, HomPolyMap]] = []
    certificates: List[DegreeCertificate] = []

    for k in range(2, order + 1):
        fk = current.term(k)
        xi, residual = solve_homological(a, fk)
        if not xi.is_zero:
            generators.append((k, xi))
            current = pushforward_ode(a, current, xi, order)
        if current.term(k) != residual:
            raise RuntimeError(
                f"pushforward disagrees with the homological solve at degree {k}"
            )

        mstar = adjoint_matrix(a, k)
        kernel_dim = len(nullspace(mstar.entries))
        space_dim = mstar.cols
        removable = fk - residual
        minimal_ok = all(
            inner_product(xi, c) == 0 for c in kernel_basis(homological_matrix(a, k))
        )
        semisimple_ok = nilpotent_ok = None
        if resolved is not None:
            a_s, a_n = resolved
            semisimple_ok = lie_derivative(transpose(a_s), residual).is_zero
            nilpotent_ok = lie_derivative(transpose(a_n), residual).is_zero
        cert = DegreeCertificate(
            degree=k,
            space_dim=space_dim,
            range_dim=space_dim - kernel_dim,
            kernel_dim=kernel_dim,
            homological_ok=lie_derivative(a, xi) == removable,
            kernel_ok=lie_derivative(at, residual).is_zero,
            minimal_ok=minimal_ok,
            semisimple_ok=semisimple_ok,
            nilpotent_ok=nilpotent_ok,
        )
        if not cert.ok:
            raise RuntimeError(f"certificate failed at degree {k}: {cert}")
        certificates.append(cert)

    log = TransformationLog(dim=n, order=order, generators=tuple(generators))
    conjugacy = verify_conjugacy(a, f, log, current, order)
    if not conjugacy.ok:
        raise RuntimeError("conjugacy verification failed after normalization")

    return NormalFormReport(
        linear_part=a,
        order=order,
        original=f.truncate(order),
        normal_form=current,
        log=log,
        certificates=tuple(certificates),
        conjugacy=conjugacy,
        split=resolved,
    )
