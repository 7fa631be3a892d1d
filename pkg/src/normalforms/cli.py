"""Command-line surface and exact JSON interchange for the engine.

Documents carry every coefficient as a rational string ("3/2", "-1", "2");
floating-point literals are rejected outright, so a parsed document is exact
and serialized reports are byte-identical across runs.  stdout carries
reports, stderr carries diagnostics.  Exit codes: 0 success, 1 input error,
2 certificate failure.

Verbs: kernel (complement basis at one degree), normalize (full pipeline),
verify (re-check a report against its system), first-integrals, examples
(emit built-in onboarding documents).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import ode as _ode
from .control import (
    ControlLinearPart,
    ControlSystem,
    ControlTransformationLog,
    SkewGenerator,
    control_complement,
    control_matrix,
    brunovsky_first_integrals,
    input_pairing,
    normal_form_defect,
    normalize_control,
    residual_basis,
    uncontrollable_example,
    verify_control_conjugacy,
)
from .homological import adjoint_matrix, lie_derivative, split, validate_split
from .polyalg import HomPoly, HomPolyMap, PolySeries, monomial_basis
from .ratmat import Matrix, nullspace, rank, transpose


class DocumentError(ValueError):
    """Input document failed validation; the message names the field."""


# ---------------------------------------------------------------------------
# rational and matrix fields
# ---------------------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


def _parse_rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise DocumentError(f"{where}: expected a rational string, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise DocumentError(
            f"{where}: floating-point literals are not accepted; "
            f"write the value as a rational string"
        )
    if not isinstance(value, str):
        raise DocumentError(f"{where}: expected a rational string")
    if not _RATIONAL_RE.match(value):
        raise DocumentError(f"{where}: malformed rational {value!r}")
    if "/" in value and int(value.split("/")[1]) == 0:
        raise DocumentError(f"{where}: malformed rational {value!r} (zero denominator)")
    return Fraction(value)


def _parse_int(value, where: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"{where}: expected an integer")
    if value < minimum:
        raise DocumentError(f"{where}: must be at least {minimum}")
    return value


def _parse_matrix(value, where: str, rows: int, cols: int) -> Matrix:
    if not isinstance(value, list) or len(value) != rows:
        raise DocumentError(f"{where}: expected a matrix with {rows} rows")
    out = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            raise DocumentError(f"{where}[{i}]: expected a row of {cols} entries")
        out.append(
            tuple(_parse_rational(v, f"{where}[{i}][{j}]") for j, v in enumerate(row))
        )
    return tuple(out)


def _rat_str(value) -> str:
    return str(Fraction(value))


def _matrix_json(a: Matrix) -> List[List[str]]:
    return [[_rat_str(v) for v in row] for row in a]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# system documents
# ---------------------------------------------------------------------------


@dataclass
class ParsedSystem:
    """Validated system document in engine form."""

    kind: str  # "ode" | "control"
    n: int
    m: int
    a: Matrix
    b: Optional[Matrix]
    series: PolySeries  # dim_in = n+m, dim_out = n
    split: Optional[Tuple[Matrix, Matrix]]

    @property
    def names(self) -> List[str]:
        return _var_names(self.n, self.m)

    def control_lin(self) -> ControlLinearPart:
        return ControlLinearPart(self.a, self.b)

    def document(self) -> dict:
        doc = {
            "kind": self.kind,
            "n": self.n,
            "m": self.m,
            "A": _matrix_json(self.a),
            "terms": _series_terms_json(self.series),
        }
        if self.kind == "control":
            doc["B"] = _matrix_json(self.b)
        if self.split is not None:
            doc["semisimple_part"] = _matrix_json(self.split[0])
            doc["nilpotent_part"] = _matrix_json(self.split[1])
        return doc


def _var_names(n: int, m: int) -> List[str]:
    names = [f"x{i + 1}" for i in range(n)]
    if m == 1:
        names.append("u")
    else:
        names.extend(f"u{i + 1}" for i in range(m))
    return names


_TERM_KEYS = {"degree", "component", "exponents", "coeff"}


def _parse_term(raw, where: str, dim_in: int, max_component: int):
    if not isinstance(raw, dict):
        raise DocumentError(f"{where}: expected an object")
    unknown = set(raw) - _TERM_KEYS
    if unknown:
        raise DocumentError(f"{where}: unexpected field {sorted(unknown)[0]!r}")
    missing = _TERM_KEYS - set(raw)
    if missing:
        raise DocumentError(f"{where}: missing field {sorted(missing)[0]!r}")
    degree = _parse_int(raw["degree"], f"{where}.degree", minimum=2)
    component = _parse_int(raw["component"], f"{where}.component", minimum=1)
    if component > max_component:
        raise DocumentError(
            f"{where}.component: out of range 1..{max_component}"
        )
    exponents = raw["exponents"]
    if not isinstance(exponents, list) or len(exponents) != dim_in:
        raise DocumentError(
            f"{where}.exponents: expected a list of {dim_in} exponents"
        )
    mi = tuple(
        _parse_int(e, f"{where}.exponents[{j}]", minimum=0)
        for j, e in enumerate(exponents)
    )
    if sum(mi) != degree:
        raise DocumentError(
            f"{where}.exponents: degree mismatch (sum {sum(mi)}, declared degree {degree})"
        )
    coeff = _parse_rational(raw["coeff"], f"{where}.coeff")
    return degree, component, mi, coeff


def _parse_terms_list(raw, where: str, dim_in: int, dim_out: int) -> PolySeries:
    if not isinstance(raw, list):
        raise DocumentError(f"{where}: expected a list of terms")
    by_degree: Dict[int, List[Dict[tuple, Fraction]]] = {}
    seen = set()
    for i, t in enumerate(raw):
        degree, component, mi, coeff = _parse_term(t, f"{where}[{i}]", dim_in, dim_out)
        key = (degree, component, mi)
        if key in seen:
            raise DocumentError(
                f"{where}[{i}]: duplicate term for component {component} at degree {degree}"
            )
        seen.add(key)
        comps = by_degree.setdefault(degree, [dict() for _ in range(dim_out)])
        comps[component - 1][mi] = coeff
    max_degree = max(by_degree, default=1)
    terms = {
        k: HomPolyMap([HomPoly(dim_in, k, comps[c]) for c in range(dim_out)])
        for k, comps in by_degree.items()
    }
    return PolySeries(dim_in, dim_out, max_degree, terms)


_SYSTEM_KEYS = {"kind", "n", "m", "A", "B", "terms", "semisimple_part", "nilpotent_part"}


def parse_system_object(raw, where: str) -> ParsedSystem:
    if not isinstance(raw, dict):
        raise DocumentError(f"{where}: expected a JSON object")
    unknown = set(raw) - _SYSTEM_KEYS
    if unknown:
        raise DocumentError(f"{where}: unexpected field {sorted(unknown)[0]!r}")
    kind = raw.get("kind")
    if kind not in ("ode", "control"):
        raise DocumentError(f"{where}.kind: must be \"ode\" or \"control\"")
    if "n" not in raw:
        raise DocumentError(f"{where}.n: missing")
    n = _parse_int(raw["n"], f"{where}.n", minimum=1)
    if "m" not in raw:
        raise DocumentError(f"{where}.m: missing")
    m = _parse_int(raw["m"], f"{where}.m", minimum=0)
    if kind == "ode" and m != 0:
        raise DocumentError(f"{where}.m: must be 0 for an ode system")
    if kind == "control" and m < 1:
        raise DocumentError(f"{where}.m: must be at least 1 for a control system")

    if "A" not in raw:
        raise DocumentError(f"{where}.A: missing")
    a = _parse_matrix(raw["A"], f"{where}.A", n, n)

    b = None
    if kind == "control":
        if "B" not in raw:
            raise DocumentError(f"{where}.B: missing (required for control systems)")
        b = _parse_matrix(raw["B"], f"{where}.B", n, m)
    elif "B" in raw:
        raise DocumentError(f"{where}.B: only allowed for control systems")

    sn_split = None
    has_s = "semisimple_part" in raw
    has_n = "nilpotent_part" in raw
    if has_s or has_n:
        if kind != "ode":
            raise DocumentError(
                f"{where}.semisimple_part: only allowed for ode systems"
            )
        if not (has_s and has_n):
            raise DocumentError(
                f"{where}: semisimple_part and nilpotent_part must be supplied together"
            )
        a_s = _parse_matrix(raw["semisimple_part"], f"{where}.semisimple_part", n, n)
        a_n = _parse_matrix(raw["nilpotent_part"], f"{where}.nilpotent_part", n, n)
        report = validate_split(a, a_s, a_n)
        if not report.ok:
            raise DocumentError(
                f"{where}: invalid semisimple/nilpotent split: "
                + "; ".join(report.failures())
            )
        sn_split = (a_s, a_n)

    if "terms" not in raw:
        raise DocumentError(f"{where}.terms: missing")
    series = _parse_terms_list(raw["terms"], f"{where}.terms", n + m, n)
    return ParsedSystem(kind=kind, n=n, m=m, a=a, b=b, series=series, split=sn_split)


def parse_system(text: str) -> ParsedSystem:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"input is not valid JSON: {exc}") from None
    return parse_system_object(raw, "document")


# ---------------------------------------------------------------------------
# term serialization
# ---------------------------------------------------------------------------


def _map_terms_json(t: HomPolyMap) -> List[dict]:
    out = []
    for i, comp in enumerate(t.components):
        for mi, cf in comp.items():
            out.append(
                {
                    "degree": t.degree,
                    "component": i + 1,
                    "exponents": list(mi),
                    "coeff": _rat_str(cf),
                }
            )
    return out


def _series_terms_json(s: PolySeries) -> List[dict]:
    out = []
    for k in s.degrees():
        out.extend(_map_terms_json(s.term(k)))
    return out


def _poly_terms_json(p: HomPoly) -> List[dict]:
    return [
        {"degree": p.degree, "exponents": list(mi), "coeff": _rat_str(cf)}
        for mi, cf in p.items()
    ]


# ---------------------------------------------------------------------------
# pretty rendering
# ---------------------------------------------------------------------------


def _mono_str(mi: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, mi):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "·".join(parts) if parts else "1"


def _signed_join(parts: List[Tuple[Fraction, str]]) -> str:
    if not parts:
        return "0"
    pieces = []
    for idx, (cf, mono) in enumerate(parts):
        mag = abs(cf)
        if mono == "1":
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}·{mono}"
        if idx == 0:
            pieces.append(f"-{body}" if cf < 0 else body)
        else:
            pieces.append(f"- {body}" if cf < 0 else f"+ {body}")
    return " ".join(pieces)


def _poly_str(p: HomPoly, names: Sequence[str]) -> str:
    return _signed_join([(cf, _mono_str(mi, names)) for mi, cf in p.items()])


def _map_str(t: HomPolyMap, names: Sequence[str]) -> str:
    return "(" + ", ".join(_poly_str(c, names) for c in t.components) + ")"


def _system_lines(
    n: int, m: int, a: Matrix, b: Optional[Matrix], series: PolySeries, names: Sequence[str]
) -> List[str]:
    lines = []
    for i in range(n):
        parts: List[Tuple[Fraction, str]] = []
        for j in range(n):
            if a[i][j]:
                parts.append((a[i][j], names[j]))
        if b is not None:
            for l in range(m):
                if b[i][l]:
                    parts.append((b[i][l], names[n + l]))
        for k in series.degrees():
            comp = series.term(k).component(i)
            for mi, cf in comp.items():
                parts.append((cf, _mono_str(mi, names)))
        lines.append(f"d{names[i]}/dt = {_signed_join(parts)}")
    return lines


# ---------------------------------------------------------------------------
# report documents
# ---------------------------------------------------------------------------


def ode_report_document(report: _ode.NormalFormReport) -> dict:
    certs = report.certificates
    equivariance = None
    if report.split is not None:
        equivariance = all(
            c.semisimple_ok and c.nilpotent_ok for c in certs
        )
    return {
        "order": report.order,
        "normal_form": _series_terms_json(report.normal_form),
        "generators": [
            {"degree": k, "terms": _map_terms_json(g)} for k, g in report.log.generators
        ],
        "certificates": {
            "kernel_residual_zero": all(c.kernel_ok for c in certs),
            "conjugacy_residual_zero": report.conjugacy.ok,
            "equivariance_zero": equivariance,
        },
        "dimensions": {
            str(c.degree): {
                "space": c.space_dim,
                "range": c.range_dim,
                "complement": c.kernel_dim,
            }
            for c in certs
        },
    }


def control_report_document(report) -> dict:
    certs = report.certificates
    return {
        "order": report.order,
        "normal_form": _series_terms_json(report.normal_form),
        "generators": [
            {
                "degree": k,
                "p_x": _map_terms_json(g.p_x),
                "p_u": _map_terms_json(g.p_u),
            }
            for k, g in report.log.generators
        ],
        "certificates": {
            "kernel_residual_zero": all(c.kernel_ok for c in certs),
            "conjugacy_residual_zero": report.conjugacy.ok,
            "equivariance_zero": None,
        },
        "dimensions": {
            str(c.degree): {
                "space": c.space_dim,
                "range": c.range_dim,
                "complement": c.residual_dim,
            }
            for c in certs
        },
    }


def _render_report(ps: ParsedSystem, doc: dict, normal: PolySeries) -> str:
    names = ps.names
    what = "ode" if ps.kind == "ode" else "control system"
    lines = [f"normal form of the {what} (n={ps.n}, m={ps.m}), order {doc['order']}:"]
    for line in _system_lines(ps.n, ps.m, ps.a, ps.b, normal, names):
        lines.append(f"  {line}")
    lines.append("generators:")
    if not doc["generators"]:
        lines.append("  (identity transformation)")
    for gen in doc["generators"]:
        if ps.kind == "ode":
            t = _terms_to_map(gen["terms"], gen["degree"], ps.n, ps.n)
            lines.append(f"  degree {gen['degree']}: xi = {_map_str(t, names)}")
        else:
            p_x = _terms_to_map(gen["p_x"], gen["degree"], ps.n, ps.n)
            p_u = _terms_to_map(gen["p_u"], gen["degree"], ps.n + ps.m, ps.m)
            lines.append(
                f"  degree {gen['degree']}: p_x = {_map_str(p_x, names[: ps.n])}, "
                f"p_u = {_map_str(p_u, names)}"
            )
    lines.append("certificates:")
    for key in ("kernel_residual_zero", "conjugacy_residual_zero", "equivariance_zero"):
        value = doc["certificates"][key]
        shown = "null" if value is None else ("true" if value else "false")
        lines.append(f"  {key}: {shown}")
    lines.append("dimensions (space / range / complement):")
    dims = doc["dimensions"]
    if not dims:
        lines.append("  (no nonlinear degrees)")
    for k in sorted(dims, key=int):
        d = dims[k]
        lines.append(f"  degree {k}: {d['space']} / {d['range']} / {d['complement']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# report documents back into engine form (for verify)
# ---------------------------------------------------------------------------


def _terms_to_map(raw: List[dict], degree: int, dim_in: int, dim_out: int) -> HomPolyMap:
    comps = [dict() for _ in range(dim_out)]
    for t in raw:
        comps[t["component"] - 1][tuple(t["exponents"])] = Fraction(t["coeff"])
    return HomPolyMap([HomPoly(dim_in, degree, c) for c in comps])


@dataclass
class ParsedReport:
    order: int
    normal: PolySeries
    ode_generators: Optional[Tuple[Tuple[int, HomPolyMap], ...]]
    control_generators: Optional[Tuple[Tuple[int, SkewGenerator], ...]]
    certificates: Dict[str, Optional[bool]]
    dimensions: Dict[int, Dict[str, int]]


_REPORT_KEYS = {"order", "normal_form", "generators", "certificates", "dimensions"}
_CERT_KEYS = {"kernel_residual_zero", "conjugacy_residual_zero", "equivariance_zero"}
_DIM_KEYS = {"space", "range", "complement"}


def parse_report_object(raw, ps: ParsedSystem, where: str) -> ParsedReport:
    if not isinstance(raw, dict):
        raise DocumentError(f"{where}: expected a JSON object")
    unknown = set(raw) - _REPORT_KEYS
    if unknown:
        raise DocumentError(f"{where}: unexpected field {sorted(unknown)[0]!r}")
    missing = _REPORT_KEYS - set(raw)
    if missing:
        raise DocumentError(f"{where}: missing field {sorted(missing)[0]!r}")
    order = _parse_int(raw["order"], f"{where}.order", minimum=1)

    n, m = ps.n, ps.m
    normal = _parse_terms_list(raw["normal_form"], f"{where}.normal_form", n + m, n)
    if any(k > order for k in normal.degrees()):
        raise DocumentError(f"{where}.normal_form: term degree exceeds the report order")
    normal = PolySeries(n + m, n, max(order, 1), dict(normal.terms))

    gens_raw = raw["generators"]
    if not isinstance(gens_raw, list):
        raise DocumentError(f"{where}.generators: expected a list")
    ode_gens: List[Tuple[int, HomPolyMap]] = []
    control_gens: List[Tuple[int, SkewGenerator]] = []
    last_degree = 1
    for i, g in enumerate(gens_raw):
        gw = f"{where}.generators[{i}]"
        if not isinstance(g, dict):
            raise DocumentError(f"{gw}: expected an object")
        expected = {"degree", "terms"} if ps.kind == "ode" else {"degree", "p_x", "p_u"}
        if set(g) != expected:
            raise DocumentError(
                f"{gw}: expected exactly the fields {sorted(expected)}"
            )
        degree = _parse_int(g["degree"], f"{gw}.degree", minimum=2)
        if degree > order:
            raise DocumentError(f"{gw}.degree: exceeds the report order")
        if degree <= last_degree:
            raise DocumentError(f"{where}.generators: degrees must be strictly increasing")
        last_degree = degree
        if ps.kind == "ode":
            series = _parse_terms_list(g["terms"], f"{gw}.terms", n, n)
            if series.degrees() not in ([], [degree]):
                raise DocumentError(f"{gw}.terms: terms must match the declared degree")
            ode_gens.append((degree, series.term(degree)))
        else:
            px_series = _parse_terms_list(g["p_x"], f"{gw}.p_x", n, n)
            pu_series = _parse_terms_list(g["p_u"], f"{gw}.p_u", n + m, m)
            if px_series.degrees() not in ([], [degree]) or pu_series.degrees() not in (
                [],
                [degree],
            ):
                raise DocumentError(f"{gw}: terms must match the declared degree")
            control_gens.append(
                (degree, SkewGenerator(px_series.term(degree), pu_series.term(degree)))
            )

    certs_raw = raw["certificates"]
    if not isinstance(certs_raw, dict) or set(certs_raw) != _CERT_KEYS:
        raise DocumentError(
            f"{where}.certificates: expected exactly the fields {sorted(_CERT_KEYS)}"
        )
    certs: Dict[str, Optional[bool]] = {}
    for key, value in certs_raw.items():
        if value is not None and not isinstance(value, bool):
            raise DocumentError(f"{where}.certificates.{key}: expected a boolean or null")
        certs[key] = value

    dims_raw = raw["dimensions"]
    if not isinstance(dims_raw, dict):
        raise DocumentError(f"{where}.dimensions: expected an object")
    dims: Dict[int, Dict[str, int]] = {}
    for key, value in dims_raw.items():
        try:
            degree = int(key)
        except ValueError:
            raise DocumentError(f"{where}.dimensions: key {key!r} is not a degree") from None
        if not isinstance(value, dict) or set(value) != _DIM_KEYS:
            raise DocumentError(
                f"{where}.dimensions[{key}]: expected exactly the fields {sorted(_DIM_KEYS)}"
            )
        dims[degree] = {
            k: _parse_int(v, f"{where}.dimensions[{key}].{k}", minimum=0)
            for k, v in value.items()
        }

    return ParsedReport(
        order=order,
        normal=normal,
        ode_generators=tuple(ode_gens) if ps.kind == "ode" else None,
        control_generators=tuple(control_gens) if ps.kind == "control" else None,
        certificates=certs,
        dimensions=dims,
    )


# ---------------------------------------------------------------------------
# verification of a (system, report) pair
# ---------------------------------------------------------------------------


def _recheck_ode(ps: ParsedSystem, rep: ParsedReport) -> Dict[str, bool]:
    a = ps.a
    n = ps.n
    order = rep.order
    g = rep.normal
    log = _ode.TransformationLog(dim=n, order=order, generators=rep.ode_generators)

    try:
        conj_ok = _ode.verify_conjugacy(a, ps.series, log, g, order).ok
    except RuntimeError:
        conj_ok = False

    at = transpose(a)
    kernel_ok = all(
        lie_derivative(at, g.term(k)).is_zero for k in range(2, order + 1)
    )

    # mirror the normalizer: derive a Jordan split when none was supplied
    resolved = _ode.resolve_split(a, ps.split)
    equivariance: Optional[bool] = None
    if resolved is not None:
        a_s, a_n = resolved
        equivariance = all(
            lie_derivative(transpose(a_s), g.term(k)).is_zero
            and lie_derivative(transpose(a_n), g.term(k)).is_zero
            for k in range(2, order + 1)
        )

    dims = {}
    for k in range(2, order + 1):
        mstar = adjoint_matrix(a, k)
        complement = len(nullspace(mstar.entries))
        dims[k] = {
            "space": mstar.cols,
            "range": mstar.cols - complement,
            "complement": complement,
        }

    recomputed = {
        "kernel_residual_zero": kernel_ok,
        "conjugacy_residual_zero": conj_ok,
        "equivariance_zero": equivariance,
    }
    return {
        "kernel_residual_zero": kernel_ok,
        "conjugacy_residual_zero": conj_ok,
        "claimed_certificates_pass": all(
            v in (True, None) for v in rep.certificates.values()
        ),
        "certificates_match": rep.certificates == recomputed,
        "dimensions_match": rep.dimensions == dims,
    }


def _recheck_control(ps: ParsedSystem, rep: ParsedReport) -> Dict[str, bool]:
    lin = ps.control_lin()
    n, m = lin.n, lin.m
    order = rep.order
    g = rep.normal
    sys_c = ControlSystem(lin, ps.series)
    log = ControlTransformationLog(n=n, m=m, order=order, generators=rep.control_generators)

    try:
        conj_ok = verify_control_conjugacy(sys_c, log, g, order).ok
    except RuntimeError:
        conj_ok = False

    kernel_ok = all(
        normal_form_defect(lin, g.term(k)).is_zero
        and input_pairing(lin, g.term(k)).is_zero
        for k in range(2, order + 1)
    )

    dims = {}
    for k in range(2, order + 1):
        space = n * len(monomial_basis(n + m, k))
        complement = len(residual_basis(lin, k))
        dims[k] = {"space": space, "range": space - complement, "complement": complement}

    recomputed = {
        "kernel_residual_zero": kernel_ok,
        "conjugacy_residual_zero": conj_ok,
        "equivariance_zero": None,
    }
    return {
        "kernel_residual_zero": kernel_ok,
        "conjugacy_residual_zero": conj_ok,
        "claimed_certificates_pass": all(
            v in (True, None) for v in rep.certificates.values()
        ),
        "certificates_match": rep.certificates == recomputed,
        "dimensions_match": rep.dimensions == dims,
    }


# ---------------------------------------------------------------------------
# the verbs
# ---------------------------------------------------------------------------


def _load_text(args) -> str:
    path = getattr(args, "input", None)
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    return sys.stdin.read()


def cmd_kernel(args) -> int:
    ps = parse_system(_load_text(args))
    degree = args.degree
    if degree < 2:
        raise DocumentError("--degree: must be at least 2")
    if ps.kind == "ode":
        splitting = split(ps.a, degree)
        basis = list(splitting.complement_basis)
        space = len(splitting.range_basis) + len(basis)
        dims = {
            "space": space,
            "range": len(splitting.range_basis),
            "complement": len(basis),
        }
    else:
        lin = ps.control_lin()
        basis = control_complement(lin, degree)
        space = lin.n * len(monomial_basis(lin.n + lin.m, degree))
        dims = {
            "space": space,
            "range": rank(control_matrix(lin, degree).entries),
            "complement": len(basis),
        }
    doc = {
        "kind": "kernel",
        "degree": degree,
        "dimensions": dims,
        "basis": [_map_terms_json(q) for q in basis],
    }
    if args.format == "json":
        sys.stdout.write(canonical_json(doc))
    else:
        names = ps.names
        lines = [
            f"complement basis at degree {degree} "
            f"({'ode' if ps.kind == 'ode' else 'control system'}, n={ps.n}, m={ps.m}):",
            f"  dimensions: space {dims['space']}, range {dims['range']}, "
            f"complement {dims['complement']}",
        ]
        for i, q in enumerate(basis):
            lines.append(f"  q{i + 1} = {_map_str(q, names)}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_normalize(args) -> int:
    ps = parse_system(_load_text(args))
    order = args.order
    if ps.kind == "ode":
        report = _ode.normalize_ode(ps.a, ps.series, order, split=ps.split)
        doc = ode_report_document(report)
        normal = report.normal_form
        all_ok = report.ok
    else:
        report = normalize_control(ControlSystem(ps.control_lin(), ps.series), order)
        doc = control_report_document(report)
        normal = report.normal_form
        all_ok = report.ok
    out = {"system": ps.document(), "report": doc}
    if args.format == "json":
        sys.stdout.write(canonical_json(out))
    else:
        sys.stdout.write(_render_report(ps, doc, normal))
    return 0 if all_ok else 2


def cmd_verify(args) -> int:
    try:
        raw = json.loads(_load_text(args))
    except json.JSONDecodeError as exc:
        raise DocumentError(f"input is not valid JSON: {exc}") from None
    if not isinstance(raw, dict) or set(raw) != {"system", "report"}:
        raise DocumentError(
            "document: expected exactly the fields ['report', 'system']"
        )
    ps = parse_system_object(raw["system"], "system")
    rep = parse_report_object(raw["report"], ps, "report")
    checks = _recheck_ode(ps, rep) if ps.kind == "ode" else _recheck_control(ps, rep)
    verified = all(checks.values())
    if args.format == "json":
        sys.stdout.write(canonical_json({"verified": verified, "checks": checks}))
    else:
        lines = ["verification of the report against its system:"]
        for key, value in checks.items():
            lines.append(f"  {key}: {'pass' if value else 'FAIL'}")
        lines.append(f"verified: {'yes' if verified else 'no'}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0 if verified else 2


def cmd_first_integrals(args) -> int:
    if args.target == "brunovsky":
        n = args.n
        integrals = brunovsky_first_integrals(n)
        names = _var_names(n, 1)
        title = f"first integrals of the characteristic field (Brunovsky pair, n={n}):"
    else:
        example = uncontrollable_example()
        integrals = list(example.first_integrals)
        names = list(example.variables)
        title = "first integrals of the built-in uncontrollable example:"
    doc = {
        "kind": "first-integrals",
        "target": args.target,
        "n": len(names) - 1,
        "variables": names,
        "integrals": [
            {"index": li.index, "terms": _poly_terms_json(li.poly)} for li in integrals
        ],
    }
    if args.format == "json":
        sys.stdout.write(canonical_json(doc))
    else:
        lines = [title]
        for li in integrals:
            lines.append(f"  l{li.index} = {_poly_str(li.poly, names)}")
        lines.append("all integrals certified: exact zero derivative along the field")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


_EXAMPLE_DOCS = {
    "brunovsky-quadratic": {
        "kind": "control",
        "n": 2,
        "m": 1,
        "A": [["0", "1"], ["0", "0"]],
        "B": [["0"], ["1"]],
        "terms": [
            {"degree": 2, "component": 1, "exponents": [0, 2, 0], "coeff": "1"}
        ],
    },
    "uncontrollable": {
        "kind": "control",
        "n": 3,
        "m": 1,
        "A": [["0", "0", "0"], ["0", "0", "1"], ["0", "0", "0"]],
        "B": [["0"], ["0"], ["1"]],
        "terms": [],
    },
}


def cmd_examples(args) -> int:
    raw = _EXAMPLE_DOCS[args.which]
    ps = parse_system_object(raw, "example")  # built-ins go through validation too
    sys.stdout.write(canonical_json(ps.document()))
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Argument errors are input errors: exit 1, not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_io_flags(sub, with_format=True):
    sub.add_argument(
        "--input",
        metavar="PATH",
        help="read the input document from PATH instead of stdin",
    )
    if with_format:
        sub.add_argument(
            "--format",
            choices=("json", "pretty"),
            default="pretty",
            help="output format (default: pretty)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="normalforms",
        description=(
            "Exact inner-product normal forms of ODEs and control systems, "
            "with machine-checkable certificates."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_kernel = sub.add_parser(
        "kernel", help="complement (classification space) basis at one degree"
    )
    p_kernel.add_argument(
        "--degree", type=int, default=2, help="homogeneous degree (default: 2)"
    )
    _add_io_flags(p_kernel)
    p_kernel.set_defaults(func=cmd_kernel)

    p_norm = sub.add_parser("normalize", help="normal form with certificates")
    p_norm.add_argument(
        "--order", type=int, default=3, help="truncation order (default: 3)"
    )
    _add_io_flags(p_norm)
    p_norm.set_defaults(func=cmd_normalize)

    p_verify = sub.add_parser(
        "verify", help="re-check a {system, report} document from scratch"
    )
    _add_io_flags(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_fi = sub.add_parser("first-integrals", help="certified polynomial first integrals")
    p_fi.add_argument(
        "target",
        nargs="?",
        choices=("brunovsky", "uncontrollable"),
        default="brunovsky",
        help="which characteristic field (default: brunovsky)",
    )
    p_fi.add_argument(
        "--n", type=int, default=2, help="number of states for brunovsky (default: 2)"
    )
    p_fi.add_argument(
        "--format",
        choices=("json", "pretty"),
        default="pretty",
        help="output format (default: pretty)",
    )
    p_fi.set_defaults(func=cmd_first_integrals)

    p_ex = sub.add_parser("examples", help="emit a built-in system document (JSON)")
    p_ex.add_argument(
        "which",
        nargs="?",
        choices=tuple(sorted(_EXAMPLE_DOCS)),
        default="brunovsky-quadratic",
        help="which example document (default: brunovsky-quadratic)",
    )
    p_ex.set_defaults(func=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
