"""Normal forms for control systems x' = Ax + Bu + f(x, u) near the origin.

Transformations live in the skew space S^k: pairs (p_x, p_u) where the state
change p_x depends on states only (a u-dependent state change would drag
derivatives of the input into the dynamics) while the feedback part p_u may
depend on states and inputs.  The control homological operator is

    (L p)(x, u) = Dp_x(x)(Ax + Bu) - A p_x(x) - B p_u(x, u),

mapping S^k into H^k, the degree-k maps R^{n+m} -> R^n.  Embedding p into a
vector field on R^{n+m} and applying the augmented linear part
A0 = [[A, B], [0, 0]] reproduces L p in the first n components (the last m
components carry D_x p_u (Ax + Bu) and are not zero in general).

Two different "complement" spaces appear and are deliberately kept apart:

* residual_basis: ker of the Gram adjoint of L — the true orthogonal
  complement of range(L).  Normalization projects onto it, and membership is
  certified by two zero conditions: the characteristic derivative vanishes
  at u = 0 and B^t q = 0.
* control_complement: solutions of the full first-order PDE system
  Dq(x, u) . (A^t x, B^t x) = A^t q, the classification space generated by
  the first integrals of the characteristic field.  This is the space the
  worked examples span; it is generally NOT the orthogonal complement (its
  elements may be removable).

Pushforwards use the control bracket ad_P g = Dg . P - D_x p_x . g, the
first-n-components shadow of the augmented vector-field bracket; the result
is independent of how the input row of the extended field is chosen.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from . import ode as _ode
from .homological import OperatorMatrix, homological_matrix
from .innerprod import (
    inner_product,
    map_gram_diagonal,
    project_coords,
    project_orthogonal,
)
from .polyalg import (
    HomPoly,
    HomPolyMap,
    PolySeries,
    directional_derivative,
    map_coords,
    map_from_coords,
    monomial_basis,
    substitute_zero,
    vf_basis,
)
from .ratmat import Matrix, mat, nullspace, solve, transpose, zeros


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


def _lift(p: HomPoly, extra: int) -> HomPoly:
    """Reinterpret p(x) as a polynomial in (x, u) with `extra` unused variables."""
    pad = (0,) * extra
    return HomPoly(p.n_vars + extra, p.degree, {mi + pad: cf for mi, cf in p.terms.items()})


def _restrict(p: HomPoly, keep: int) -> HomPoly:
    """Drop trailing variables from p; every dropped exponent must be zero."""
    out = {}
    for mi, cf in p.terms.items():
        if any(mi[keep:]):
            raise ValueError("polynomial depends on a variable being dropped")
        out[mi[:keep]] = cf
    return HomPoly(keep, p.degree, out)


@dataclass(frozen=True)
class ControlLinearPart:
    """Linear data (A, B) of a control system; exposes the augmented matrices."""

    a: Matrix
    b: Matrix

    def __post_init__(self):
        a = mat(self.a)
        b = mat(self.b)
        n = len(a)
        if n == 0 or len(a[0]) != n:
            raise ValueError("A must be a non-empty square matrix")
        if len(b) != n or not b[0]:
            raise ValueError("B must have the same number of rows as A and at least one column")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def m(self) -> int:
        return len(self.b[0])

    @property
    def aug(self) -> Matrix:
        """(A B) as an n x (n+m) matrix."""
        return tuple(ra + rb for ra, rb in zip(self.a, self.b))

    @property
    def aug0(self) -> Matrix:
        """[[A, B], [0, 0]] as an (n+m) x (n+m) matrix."""
        n, m = self.n, self.m
        return self.aug + zeros(m, n + m)


@dataclass(frozen=True)
class SkewGenerator:
    """Element of S^k: state part p_x(x) and feedback part p_u(x, u)."""

    p_x: HomPolyMap
    p_u: HomPolyMap

    def __post_init__(self):
        n = self.p_x.dim_in
        if self.p_x.dim_out != n:
            raise ValueError("p_x must be a square map on the state variables")
        if self.p_u.dim_in <= n:
            raise ValueError("p_u must take the state and input variables")
        if self.p_u.dim_out != self.p_u.dim_in - n:
            raise ValueError("p_u must have one component per input variable")
        if self.p_x.degree != self.p_u.degree:
            raise ValueError("p_x and p_u must share a degree")

    @property
    def n(self) -> int:
        return self.p_x.dim_in

    @property
    def m(self) -> int:
        return self.p_u.dim_out

    @property
    def degree(self) -> int:
        return self.p_x.degree

    @property
    def is_zero(self) -> bool:
        return self.p_x.is_zero and self.p_u.is_zero

    def embed(self) -> HomPolyMap:
        """The vector field (p_x(x), p_u(x,u)) on R^{n+m}."""
        lifted = [_lift(c, self.m) for c in self.p_x.components]
        return HomPolyMap(tuple(lifted) + self.p_u.components)

    @classmethod
    def zero(cls, n: int, m: int, degree: int) -> "SkewGenerator":
        return cls(HomPolyMap.zero(n, n, degree), HomPolyMap.zero(n + m, m, degree))


@dataclass(frozen=True)
class ControlSystem:
    """x' = Ax + Bu + nonlinear(x, u), the nonlinear part graded by degree."""

    lin: ControlLinearPart
    nonlinear: PolySeries

    def __post_init__(self):
        if self.nonlinear.dim_in != self.lin.n + self.lin.m:
            raise ValueError("nonlinear terms must be functions of the states and inputs")
        if self.nonlinear.dim_out != self.lin.n:
            raise ValueError("nonlinear terms must target the state equations")

    @classmethod
    def linear(cls, lin: ControlLinearPart, max_degree: int) -> "ControlSystem":
        return cls(lin, PolySeries.zero(lin.n + lin.m, lin.n, max_degree))


@dataclass(frozen=True)
class FirstIntegral:
    """Polynomial constant along a characteristic field, with its index."""

    index: int
    poly: HomPoly


# ---------------------------------------------------------------------------
# the skew space S^k
# ---------------------------------------------------------------------------


def skew_basis(n: int, m: int, degree: int) -> List[SkewGenerator]:
    """Monomial basis of S^k: the p_x block, then the p_u block."""
    if n < 1 or m < 1:
        raise ValueError("need at least one state and one input")
    if degree < 2:
        raise ValueError("transformations start at degree 2")
    out = []
    for b in vf_basis(n, n, degree):
        out.append(SkewGenerator(b, HomPolyMap.zero(n + m, m, degree)))
    for b in vf_basis(n + m, m, degree):
        out.append(SkewGenerator(HomPolyMap.zero(n, n, degree), b))
    return out


def skew_dim(n: int, m: int, degree: int) -> int:
    return n * len(monomial_basis(n, degree)) + m * len(monomial_basis(n + m, degree))


def skew_gram_diagonal(n: int, m: int, degree: int) -> List[int]:
    """Gram weights of the S^k inner product, aligned with skew_basis."""
    return list(map_gram_diagonal(n, n, degree)) + list(map_gram_diagonal(n + m, m, degree))


def skew_coords(p: SkewGenerator) -> List[Fraction]:
    return list(map_coords(p.p_x)) + list(map_coords(p.p_u))


def skew_from_coords(n: int, m: int, degree: int, coords: Sequence[Fraction]) -> SkewGenerator:
    nx = n * len(monomial_basis(n, degree))
    p_x = map_from_coords(n, n, degree, coords[:nx])
    p_u = map_from_coords(n + m, m, degree, coords[nx:])
    return SkewGenerator(p_x, p_u)


def skew_inner_product(p: SkewGenerator, q: SkewGenerator) -> Fraction:
    return inner_product(p.p_x, q.p_x) + inner_product(p.p_u, q.p_u)


# ---------------------------------------------------------------------------
# the control homological operator
# ---------------------------------------------------------------------------


def control_homological(lin: ControlLinearPart, p: SkewGenerator) -> HomPolyMap:
    """L p = Dp_x (Ax + Bu) - A p_x - B p_u, a degree-k map R^{n+m} -> R^n."""
    n, m = lin.n, lin.m
    if p.n != n or p.m != m:
        raise ValueError("generator dimensions do not match the linear part")
    k = p.degree
    drive = HomPolyMap.from_matrix(lin.aug0, dim_in=n + m)
    lifted = [_lift(c, m) for c in p.p_x.components]
    comps = []
    for i in range(n):
        acc = directional_derivative(drive.components, lifted[i])
        for j in range(n):
            if lin.a[i][j]:
                acc = acc - lin.a[i][j] * lifted[j]
        for l in range(m):
            if lin.b[i][l]:
                acc = acc - lin.b[i][l] * p.p_u.component(l)
        comps.append(acc)
    return HomPolyMap(comps)


def control_matrix(lin: ControlLinearPart, degree: int) -> OperatorMatrix:
    """Matrix of the control homological operator, skew basis -> H^k basis."""
    n, m = lin.n, lin.m
    domain = tuple(skew_basis(n, m, degree))
    codomain = tuple(vf_basis(n + m, n, degree))
    columns = [map_coords(control_homological(lin, p)) for p in domain]
    rows = n * len(monomial_basis(n + m, degree))
    entries = tuple(tuple(col[i] for col in columns) for i in range(rows))
    return OperatorMatrix(entries=entries, domain_basis=domain, codomain_basis=codomain)


def characteristic_field(lin: ControlLinearPart) -> HomPolyMap:
    """The linear field (A^t x, B^t x) on R^{n+m} driving the adjoint PDE."""
    return HomPolyMap.from_matrix(transpose(lin.aug0), dim_in=lin.n + lin.m)


def pde_defect(field: HomPolyMap, coupling: Matrix, q: HomPolyMap) -> HomPolyMap:
    """Dq . field - coupling . q, the defect of a linear first-order PDE system."""
    if field.degree != 1 or field.dim_in != field.dim_out:
        raise ValueError("the PDE field must be a square linear map")
    if q.dim_in != field.dim_in or q.dim_out != len(coupling):
        raise ValueError("q does not match the PDE shape")
    comps = []
    for i in range(q.dim_out):
        acc = directional_derivative(field.components, q.component(i))
        for j, cf in enumerate(coupling[i]):
            if cf:
                acc = acc - cf * q.component(j)
        comps.append(acc)
    return HomPolyMap(comps)


def pde_kernel(field: HomPolyMap, coupling: Matrix, degree: int) -> List[HomPolyMap]:
    """Deterministic basis of {q : Dq . field = coupling . q identically}."""
    n_total = field.dim_in
    dim_out = len(coupling)
    basis = vf_basis(n_total, dim_out, degree)
    columns = [map_coords(pde_defect(field, coupling, b)) for b in basis]
    dim = len(columns[0])
    entries = tuple(tuple(col[i] for col in columns) for i in range(dim))
    out = []
    for v in nullspace(entries):
        out.append(map_from_coords(n_total, dim_out, degree, v))
    return out


def characteristic_derivative(lin: ControlLinearPart, q: HomPolyMap) -> HomPolyMap:
    """Dq . (A^t x, B^t x) - A^t q over the full (x, u) space."""
    return pde_defect(characteristic_field(lin), transpose(lin.a), q)


def normal_form_defect(lin: ControlLinearPart, fk: HomPolyMap) -> HomPolyMap:
    """Characteristic derivative of fk restricted to u = 0.

    Vanishing of this map is the zero-input half of the membership
    certificate for normal-form terms; together with B^t fk = 0 it
    characterizes the orthogonal complement of range(L).
    """
    n, m = lin.n, lin.m
    full = characteristic_derivative(lin, fk)
    u_idx = range(n, n + m)
    return HomPolyMap([substitute_zero(c, u_idx) for c in full.components])


def input_pairing(lin: ControlLinearPart, fk: HomPolyMap) -> HomPolyMap:
    """B^t fk, the input-direction half of the membership certificate."""
    bt = transpose(lin.b)
    comps = []
    for row in bt:
        acc = HomPoly.zero(fk.dim_in, fk.degree)
        for cf, c in zip(row, fk.components):
            if cf:
                acc = acc + cf * c
        comps.append(acc)
    return HomPolyMap(comps)


def control_adjoint_matrix(lin: ControlLinearPart, degree: int) -> OperatorMatrix:
    """Matrix of the Gram adjoint of the control homological operator.

    Assembled twice: by conjugating the operator matrix with the two Gram
    diagonals, and directly from the closed form
    (q -> ((Dq.(A^tx, B^tx) - A^tq)|_{u=0} restricted to x, -B^t q)).
    The two must agree entry for entry.
    """
    n, m = lin.n, lin.m
    mop = control_matrix(lin, degree)
    w_h = map_gram_diagonal(n + m, n, degree)
    w_s = skew_gram_diagonal(n, m, degree)
    dim_h, dim_s = len(w_h), len(w_s)
    conjugated = tuple(
        tuple(mop.entries[h][s] * Fraction(w_h[h], w_s[s]) for h in range(dim_h))
        for s in range(dim_s)
    )

    u_idx = range(n, n + m)
    direct_cols = []
    for q in mop.codomain_basis:
        zeroed = normal_form_defect(lin, q)
        p_x = HomPolyMap([_restrict(c, n) for c in zeroed.components])
        p_u = -input_pairing(lin, q)
        direct_cols.append(skew_coords(SkewGenerator(p_x, p_u)))
    direct = tuple(tuple(col[s] for col in direct_cols) for s in range(dim_s))

    if conjugated != direct:
        raise RuntimeError(
            "control adjoint cross-check failed: Gram conjugation disagrees "
            "with the closed-form adjoint"
        )
    return OperatorMatrix(
        entries=direct, domain_basis=mop.codomain_basis, codomain_basis=mop.domain_basis
    )


def residual_basis(lin: ControlLinearPart, degree: int) -> List[HomPolyMap]:
    """Basis of the orthogonal complement of range(L): ker of the adjoint."""
    mstar = control_adjoint_matrix(lin, degree)
    n, m = lin.n, lin.m
    return [map_from_coords(n + m, n, degree, v) for v in nullspace(mstar.entries)]


def control_complement(lin: ControlLinearPart, degree: int) -> List[HomPolyMap]:
    """Solutions of the full characteristic PDE Dq.(A^tx, B^tx) = A^t q.

    This is the classification space spanned by first-integral combinations;
    see the module docstring for how it differs from residual_basis.
    """
    return pde_kernel(characteristic_field(lin), transpose(lin.a), degree)


def augmented_matrix_operator(lin: ControlLinearPart, degree: int) -> OperatorMatrix:
    """Matrix of the full augmented operator L_{A0} on maps R^{n+m} -> R^{n+m}.

    Cross-checked at construction: the first n component rows at the columns
    of embedded skew basis elements must reproduce control_matrix exactly.
    """
    n, m = lin.n, lin.m
    aug = homological_matrix(lin.aug0, degree)
    mop = control_matrix(lin, degree)
    mons = monomial_basis(n + m, degree)
    index_of = {mi: i for i, mi in enumerate(mons)}
    rows_x = n * len(mons)

    def embedded_column(p: SkewGenerator) -> int:
        if not p.p_u.is_zero:
            for l in range(m):
                comp = p.p_u.component(l)
                if not comp.is_zero:
                    (mi, _), = comp.terms.items()
                    return (n + l) * len(mons) + index_of[mi]
        for j in range(n):
            comp = p.p_x.component(j)
            if not comp.is_zero:
                (mi, _), = comp.terms.items()
                return j * len(mons) + index_of[mi + (0,) * m]
        raise ValueError("zero basis element")

    for s, p in enumerate(mop.domain_basis):
        c = embedded_column(p)
        for i in range(rows_x):
            if aug.entries[i][c] != mop.entries[i][s]:
                raise RuntimeError(
                    "augmented operator cross-check failed: the state rows do "
                    "not match the control homological matrix"
                )
    return aug


# ---------------------------------------------------------------------------
# pushforward along skew flows
# ---------------------------------------------------------------------------


def _ad_control(p_embed: HomPolyMap, px_lift: List[HomPoly], g: HomPolyMap) -> HomPolyMap:
    """Control bracket Dg . P - D_x p_x . g for g: R^{n+m} -> R^n.

    This is the first-n-components image of the vector-field bracket with
    the embedded generator; it is well defined on the state rows alone
    because p_x never depends on the inputs.
    """
    n = len(px_lift)
    m = g.dim_in - n
    first = [directional_derivative(p_embed.components, g.component(i)) for i in range(n)]
    padded = tuple(g.components) + tuple(
        HomPoly.zero(g.dim_in, g.degree) for _ in range(m)
    )
    second = [directional_derivative(padded, px_lift[i]) for i in range(n)]
    return HomPolyMap([a - b for a, b in zip(first, second)])


def pushforward_control(sys: ControlSystem, p: SkewGenerator, order: int) -> ControlSystem:
    """Transform the system by the time-1 flow of the skew field (p_x, p_u).

    The state change x = phi(z) (from p_x) never involves the inputs, and the
    feedback u = psi(z, v) is near-identity in v, so the result is again a
    control system.  Degree-k term changes by -L p; computed with the
    truncated control Lie series.
    """
    lin = sys.lin
    n, m = lin.n, lin.m
    if p.n != n or p.m != m:
        raise ValueError("generator dimensions do not match the system")
    if p.degree < 2:
        raise ValueError("generator must have degree at least 2")

    p_embed = p.embed()
    px_lift = [_lift(c, m) for c in p.p_x.components]

    graded: Dict[int, HomPolyMap] = {1: HomPolyMap.from_matrix(lin.aug, dim_in=n + m)}
    for k in sys.nonlinear.degrees():
        if k <= order:
            graded[k] = sys.nonlinear.term(k)

    result = dict(graded)
    term = graded
    step = p.degree - 1
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
            adh = _ad_control(p_embed, px_lift, h)
            if adh.is_zero:
                continue
            nxt[nd] = nxt[nd] + adh if nd in nxt else adh
        term = nxt
        for d, h in term.items():
            contrib = Fraction(1, fact) * h
            result[d] = result[d] + contrib if d in result else contrib

    new_terms = PolySeries(n + m, n, order, {d: t for d, t in result.items() if d >= 2})
    return ControlSystem(lin, new_terms)


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ControlTransformationLog:
    """Nonzero skew generators applied during normalization, by degree."""

    n: int
    m: int
    order: int
    generators: Tuple[Tuple[int, SkewGenerator], ...]

    def generator(self, degree: int):
        for d, g in self.generators:
            if d == degree:
                return g
        return None

    def embedded(self) -> _ode.TransformationLog:
        """The same flows viewed as vector fields on R^{n+m}."""
        return _ode.TransformationLog(
            dim=self.n + self.m,
            order=self.order,
            generators=tuple((d, g.embed()) for d, g in self.generators),
        )

    def transformation(self) -> PolySeries:
        """Composite near-identity map on R^{n+m} (state rows input-free)."""
        return self.embedded().transformation()


@dataclass(frozen=True)
class ControlDegreeCertificate:
    """Exact per-degree checks backing one control normalization step."""

    degree: int
    space_dim: int
    skew_dim: int
    range_dim: int
    residual_dim: int
    homological_ok: bool  # L p_k = f_k - g_k
    kernel_ok: bool  # defect at u=0 and B^t pairing both vanish on g_k
    minimal_ok: bool  # p_k orthogonal to ker L in the skew inner product

    @property
    def ok(self) -> bool:
        return self.homological_ok and self.kernel_ok and self.minimal_ok


@dataclass(frozen=True)
class ControlNormalFormReport:
    """Everything produced by normalize_control, exact and re-checkable."""

    lin: ControlLinearPart
    order: int
    original: PolySeries
    normal_form: PolySeries
    log: ControlTransformationLog
    certificates: Tuple[ControlDegreeCertificate, ...]
    conjugacy: _ode.ConjugacyReport  # on the augmented embedding

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.certificates) and self.conjugacy.ok

    def certificate(self, degree: int) -> ControlDegreeCertificate:
        for c in self.certificates:
            if c.degree == degree:
                return c
        raise KeyError(f"no certificate at degree {degree}")


def _augment_series(f: PolySeries, n: int, m: int, order: int) -> PolySeries:
    """Extend state-row terms with zero input rows: (f, 0) on R^{n+m}."""
    terms = {}
    for k in f.degrees():
        if k > order:
            continue
        t = f.term(k)
        comps = tuple(t.components) + tuple(
            HomPoly.zero(n + m, k) for _ in range(m)
        )
        terms[k] = HomPolyMap(comps)
    return PolySeries(n + m, n + m, order, terms)


def _state_rows(t: HomPolyMap, n: int) -> HomPolyMap:
    return HomPolyMap(t.components[:n])


def verify_control_conjugacy(
    sys: ControlSystem, log: ControlTransformationLog, g: PolySeries, order: int
) -> _ode.ConjugacyReport:
    """Check the claimed conjugacy on the augmented space.

    The original field is extended with zero input rows, every logged skew
    generator is embedded, and the fully augmented field is pushed forward;
    its state rows must reproduce g exactly (the input rows are whatever the
    flow produces — they do not enter the claim).  Both augmented-space
    conjugacy routes (Lie series and the flow-map identity) then run on the
    extended data.
    """
    lin = sys.lin
    n, m = lin.n, lin.m
    aug0 = lin.aug0
    f_aug = _augment_series(sys.nonlinear, n, m, order)
    aug_log = log.embedded()

    g_aug = f_aug.truncate(order)
    for _, gen in aug_log.generators:
        g_aug = _ode.pushforward_ode(aug0, g_aug, gen, order)
    for k in range(2, order + 1):
        if _state_rows(g_aug.term(k), n) != g.term(k):
            raise RuntimeError(
                f"augmented pushforward disagrees with the claimed normal form "
                f"at degree {k}"
            )
    return _ode.verify_conjugacy(aug0, f_aug, aug_log, g_aug, order)


def normalize_control(sys: ControlSystem, order: int) -> ControlNormalFormReport:
    """Degree-by-degree normal form of a control system through the order.

    At each degree the term splits orthogonally against range(L); the
    leftover residual satisfies the two membership conditions (vanishing
    characteristic derivative at u = 0, vanishing B^t pairing) and the skew
    generator is the minimal-norm preimage of the removable part.
    """
    lin = sys.lin
    n, m = lin.n, lin.m
    if order < 2:
        order = 1
    current = sys.nonlinear.truncate(order)
    generators: List[Tuple[int, SkewGenerator]] = []
    certificates: List[ControlDegreeCertificate] = []

    for k in range(2, order + 1):
        fk = current.term(k)
        mop = control_matrix(lin, k)
        mstar = control_adjoint_matrix(lin, k)
        res = [map_from_coords(n + m, n, k, v) for v in nullspace(mstar.entries)]
        residual, removable = project_orthogonal(fk, res)

        coords = solve(mop.entries, map_coords(removable))
        if coords is None:
            raise RuntimeError(
                "control homological equation is inconsistent: the residual "
                "projection did not land in the range"
            )
        kern = nullspace(mop.entries)
        if kern:
            _, coords = project_coords(coords, kern, skew_gram_diagonal(n, m, k))
        p = skew_from_coords(n, m, k, coords)

        if not p.is_zero:
            generators.append((k, p))
            current = pushforward_control(
                ControlSystem(lin, current), p, order
            ).nonlinear
        if current.term(k) != residual:
            raise RuntimeError(
                f"pushforward disagrees with the homological solve at degree {k}"
            )

        space_dim = n * len(monomial_basis(n + m, k))
        residual_dim = len(res)
        w_s = skew_gram_diagonal(n, m, k)
        minimal_ok = all(
            sum(c * w * kv for c, w, kv in zip(coords, w_s, kvec)) == 0
            for kvec in kern
        )
        cert = ControlDegreeCertificate(
            degree=k,
            space_dim=space_dim,
            skew_dim=len(w_s),
            range_dim=space_dim - residual_dim,
            residual_dim=residual_dim,
            homological_ok=control_homological(lin, p) == removable,
            kernel_ok=(
                normal_form_defect(lin, residual).is_zero
                and input_pairing(lin, residual).is_zero
            ),
            minimal_ok=minimal_ok,
        )
        if not cert.ok:
            raise RuntimeError(f"certificate failed at degree {k}: {cert}")
        certificates.append(cert)

    log = ControlTransformationLog(n=n, m=m, order=order, generators=tuple(generators))
    conjugacy = verify_control_conjugacy(sys, log, current, order)
    if not conjugacy.ok:
        raise RuntimeError("conjugacy verification failed after control normalization")

    return ControlNormalFormReport(
        lin=lin,
        order=order,
        original=sys.nonlinear.truncate(order),
        normal_form=current,
        log=log,
        certificates=tuple(certificates),
        conjugacy=conjugacy,
    )


# ---------------------------------------------------------------------------
# worked linear parts, first integrals
# ---------------------------------------------------------------------------


def brunovsky_pair(n: int) -> ControlLinearPart:
    """Single-input controllable pair: A the upper shift, B the last unit vector."""
    if n < 1:
        raise ValueError("need at least one state")
    a = tuple(
        tuple(Fraction(1) if j == i + 1 else Fraction(0) for j in range(n))
        for i in range(n)
    )
    b = tuple((Fraction(1),) if i == n - 1 else (Fraction(0),) for i in range(n))
    return ControlLinearPart(a, b)


def integral_defect(field: HomPolyMap, p: HomPoly) -> HomPoly:
    """Directional derivative of p along the field; zero iff p is an integral."""
    return directional_derivative(field.components, p)


def brunovsky_first_integrals(n: int) -> List[FirstIntegral]:
    """The chain of polynomial first integrals of the shift characteristic field.

    l_1 = x_1 and, for i = 2..floor(n/2)+1,
        l_i = x_i^2/2 + sum_{k>=1} (-1)^k x_{i-k} x_{i+k}
    with x_{n+1} read as u and the sum over all index-valid k.  Every
    returned polynomial is certified by an exact zero directional
    derivative; a failure here aborts rather than returning a wrong basis.
    """
    if n < 1:
        raise ValueError("need at least one state")
    lin = brunovsky_pair(n)
    fld = characteristic_field(lin)
    nv = n + 1  # states plus the single input

    def var_sq(i: int) -> Dict[Tuple[int, ...], Fraction]:
        mi = tuple(2 if j == i else 0 for j in range(nv))
        return {mi: Fraction(1, 2)}

    def var_pair(i: int, j: int) -> Tuple[int, ...]:
        return tuple(1 if t in (i, j) else 0 for t in range(nv))

    out = [FirstIntegral(1, HomPoly.variable(nv, 0))]
    r = n // 2
    for i in range(2, r + 2):
        terms = var_sq(i - 1)
        k = 1
        while i - k >= 1 and i + k <= n + 1:
            mi = var_pair(i - k - 1, i + k - 1)
            terms[mi] = terms.get(mi, Fraction(0)) + Fraction(-1) ** k
            k += 1
        out.append(FirstIntegral(i, HomPoly(nv, 2, terms)))

    for integral in out:
        if not integral_defect(fld, integral.poly).is_zero:
            raise RuntimeError(
                f"first integral l_{integral.index} failed its annihilation "
                f"certificate for n={n}"
            )
    return out


# ---------------------------------------------------------------------------
# the built-in uncontrollable example
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UncontrollableExample:
    """Three-state, one-input system with an uncontrollable direction.

    States (z, x1, x2) with dynamics z' = 0, x1' = x2, x2' = u + nonlinear
    terms; z is decoupled from the input.  The characteristic field and the
    first integrals are stored exactly as worked out for this block
    structure: X = z d/dx2 + x2 d/du with integrals {z, x1, x2^2 - 2zu}.
    (Note X is written in the example's own variable labeling; it is not
    characteristic_field(lin), whose labels swap the roles of z and x1 —
    both variants are exercised by the tests.)
    """

    lin: ControlLinearPart
    variables: Tuple[str, ...]
    field: HomPolyMap
    first_integrals: Tuple[FirstIntegral, ...]

    def pde_defect(self, q: HomPolyMap) -> HomPolyMap:
        """Defect of the example's PDE rows (Xq_1, Xq_2, Xq_3 - q_2)."""
        return pde_defect(self.field, transpose(self.lin.a), q)

    def complement(self, degree: int) -> List[HomPolyMap]:
        """Kernel of the example's PDE system at the given degree."""
        return pde_kernel(self.field, transpose(self.lin.a), degree)

    def scalar_kernel(self, degree: int) -> List[HomPoly]:
        """Scalar solutions of Xp = 0 at the given degree."""
        zero = mat([[0]])
        return [
            q.component(0)
            for q in pde_kernel(self.field, zero, degree)
        ]


def uncontrollable_example() -> UncontrollableExample:
    """The built-in uncontrollable fixture, integrals certified on construction."""
    a = mat([[0, 0, 0], [0, 0, 1], [0, 0, 0]])
    b = mat([[0], [0], [1]])
    lin = ControlLinearPart(a, b)
    nv = 4  # (z, x1, x2, u)
    zero = HomPoly.zero(nv, 1)
    fld = HomPolyMap([zero, zero, HomPoly.variable(nv, 0), HomPoly.variable(nv, 2)])

    ell3 = HomPoly(
        nv,
        2,
        {
            (0, 0, 2, 0): Fraction(1),
            (1, 0, 0, 1): Fraction(-2),
        },
    )
    integrals = (
        FirstIntegral(1, HomPoly.variable(nv, 0)),
        FirstIntegral(2, HomPoly.variable(nv, 1)),
        FirstIntegral(3, ell3),
    )
    for integral in integrals:
        if not integral_defect(fld, integral.poly).is_zero:
            raise RuntimeError(
                f"uncontrollable-example integral {integral.index} failed its "
                f"annihilation certificate"
            )
    return UncontrollableExample(
        lin=lin,
        variables=("z", "x1", "x2", "u"),
        field=fld,
        first_integrals=integrals,
    )
