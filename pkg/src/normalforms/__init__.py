"""Exact inner-product normal forms of ODEs and control systems near equilibria.

Everything runs over the rationals: normal forms, normalizing
transformations, and the certificates that back them (kernel membership,
conjugacy residuals along two independent routes, equivariance under a
semisimple/nilpotent split) are computed and re-checked in exact arithmetic.
No tolerances anywhere; a failed internal cross-check raises instead of
degrading.

Layers, bottom up:

- ratmat: dense rational linear algebra (RREF, nullspace, solve, charpoly).
- polyalg: homogeneous polynomials, polynomial maps, graded series,
  truncated composition.
- innerprod: the factorial-weighted inner product and exact orthogonal
  projections.
- homological: the operator L_A f = Df.Ax - Af, its Gram adjoint, and the
  range/complement splitting of each graded slice.
- ode: degree-by-degree normalization of x' = Ax + f(x) via time-1 flows.
- control: the skew-transformation calculus for x' = Ax + Bu + f(x, u),
  Brunovsky first integrals, and the built-in uncontrollable example.
- cli: JSON documents and the command-line verbs.
"""

from .control import (
    ControlDegreeCertificate,
    ControlLinearPart,
    ControlNormalFormReport,
    ControlSystem,
    ControlTransformationLog,
    FirstIntegral,
    SkewGenerator,
    UncontrollableExample,
    augmented_matrix_operator,
    brunovsky_first_integrals,
    brunovsky_pair,
    characteristic_derivative,
    characteristic_field,
    control_adjoint_matrix,
    control_complement,
    control_homological,
    control_matrix,
    input_pairing,
    integral_defect,
    normal_form_defect,
    normalize_control,
    pde_defect,
    pde_kernel,
    pushforward_control,
    residual_basis,
    skew_basis,
    skew_coords,
    skew_dim,
    skew_from_coords,
    skew_gram_diagonal,
    skew_inner_product,
    uncontrollable_example,
    verify_control_conjugacy,
)
from .homological import (
    OperatorMatrix,
    SplitReport,
    Splitting,
    adjoint_matrix,
    homological_matrix,
    jordan_split,
    kernel_basis,
    lie_derivative,
    resonant_kernel_basis,
    split,
    validate_split,
)
from .innerprod import (
    gram_diagonal,
    inner_product,
    inner_product_scalar,
    map_gram_diagonal,
    monomial_weight,
    project_coords,
    project_orthogonal,
)
from .ode import (
    ConjugacyReport,
    DegreeCertificate,
    NormalFormReport,
    TransformationLog,
    compose_near_identity,
    flow_conjugacy_residuals,
    flow_map,
    normalize_ode,
    pushforward_ode,
    pushforward_residuals,
    resolve_split,
    solve_homological,
    verify_conjugacy,
)
from .polyalg import (
    HomPoly,
    HomPolyMap,
    PolySeries,
    compose_linear,
    compose_truncated,
    directional_derivative,
    evaluate,
    evaluate_map,
    grlex_key,
    map_coords,
    map_from_coords,
    monomial_basis,
    multiply,
    partial_derivative,
    substitute_zero,
    vf_basis,
)

__version__ = "0.1.0"

__all__ = [
    "ConjugacyReport",
    "ControlDegreeCertificate",
    "ControlLinearPart",
    "ControlNormalFormReport",
    "ControlSystem",
    "ControlTransformationLog",
    "DegreeCertificate",
    "FirstIntegral",
    "HomPoly",
    "HomPolyMap",
    "NormalFormReport",
    "OperatorMatrix",
    "PolySeries",
    "SkewGenerator",
    "SplitReport",
    "Splitting",
    "TransformationLog",
    "UncontrollableExample",
    "adjoint_matrix",
    "augmented_matrix_operator",
    "brunovsky_first_integrals",
    "brunovsky_pair",
    "characteristic_derivative",
    "characteristic_field",
    "compose_linear",
    "compose_near_identity",
    "compose_truncated",
    "control_adjoint_matrix",
    "control_complement",
    "control_homological",
    "control_matrix",
    "directional_derivative",
    "evaluate",
    "evaluate_map",
    "flow_conjugacy_residuals",
    "flow_map",
    "gram_diagonal",
    "grlex_key",
    "homological_matrix",
    "inner_product",
    "inner_product_scalar",
    "input_pairing",
    "integral_defect",
    "jordan_split",
    "kernel_basis",
    "lie_derivative",
    "map_coords",
    "map_from_coords",
    "map_gram_diagonal",
    "monomial_basis",
    "monomial_weight",
    "multiply",
    "normal_form_defect",
    "normalize_control",
    "normalize_ode",
    "partial_derivative",
    "pde_defect",
    "pde_kernel",
    "project_coords",
    "project_orthogonal",
    "pushforward_control",
    "pushforward_ode",
    "pushforward_residuals",
    "residual_basis",
    "resolve_split",
    "resonant_kernel_basis",
    "skew_basis",
    "skew_coords",
    "skew_dim",
    "skew_from_coords",
    "skew_gram_diagonal",
    "skew_inner_product",
    "solve_homological",
    "split",
    "substitute_zero",
    "uncontrollable_example",
    "validate_split",
    "verify_conjugacy",
    "verify_control_conjugacy",
    "vf_basis",
]
