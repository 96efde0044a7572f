"""Versioned JSON formats for structure equations, forms and Beltrami
differentials.

The structure-equation schema is
{ "format", "name", "n", "m", "d": { "<i>": [ {"coeff": "...",
"factors": ["1", "bar3"]}, ... ] } } with exact scalar strings like
"-1/2", "1/2+3/4i" or, for parameter-dependent coefficients (emitted by
the symbolic deformation mode), "1-t2*tbar4".  Emission is canonical:
sorted monomials, lowest terms, two-space indent; emit(parse(x)) is
byte-identical for canonicalized files.  The parser rejects d-entries
with two anti-holomorphic factors.
"""

from __future__ import annotations

import json
from typing import Dict, List, Optional

from .algebra import Form, FormAlgebra, StructureEquations, T10, VectorValuedForm
from .errors import FormatError
from .scalars import ParamScalar, PolyRing, format_scalar, parse_scalar

SE_FORMAT = "nilforms.se/1"
FORM_FORMAT = "nilforms.form/1"
BELTRAMI_FORMAT = "nilforms.beltrami/1"

DEFAULT_TRUNCATION = 4


def _factor_name(sym: int, n: int) -> str:
    return str(sym + 1) if sym < n else f"bar{sym - n + 1}"


def _parse_factor(name: str, n: int):
    """-> (is_bar, index)."""
    text = name.strip()
    bar = text.startswith("bar")
    if bar:
        text = text[3:]
    try:
        idx = int(text)
    except ValueError as exc:
        raise FormatError(f"bad coframe factor {name!r}") from exc
    if not 1 <= idx <= n:
        raise FormatError(f"coframe factor {name!r} out of range 1..{n}")
    return bar, idx


def _two_form_terms(f: Form) -> List[dict]:
    n = f.algebra.n
    terms = []
    for m in sorted(f.coeffs):
        I, J = m
        if len(I) + len(J) != 2:
            raise FormatError("structure entries must be 2-forms")
        factors = [str(i) for i in I] + [f"bar{j}" for j in J]
        terms.append({"coeff": format_scalar(f.coeffs[m]), "factors": factors})
    return terms


def se_to_obj(se: StructureEquations) -> dict:
    ring = se.algebra.ring
    obj = {
        "format": SE_FORMAT,
        "name": se.name,
        "n": se.n,
        "m": ring.m,
    }
    if ring.m:
        obj["truncation"] = ring.order
    obj["d"] = {
        str(i): _two_form_terms(se.d_coframe[i])
        for i in range(1, se.n + 1)
        if se.d_coframe[i]
    }
    return obj


def obj_to_se(obj: dict) -> StructureEquations:
    if obj.get("format", SE_FORMAT) != SE_FORMAT:
        raise FormatError(f"unsupported structure-equation format {obj.get('format')!r}")
    try:
        n = int(obj["n"])
        m = int(obj.get("m", 0))
        name = obj.get("name", "unnamed")
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed structure-equation header: {exc}") from exc
    order = int(obj.get("truncation", DEFAULT_TRUNCATION)) if m else 0
    ring = PolyRing(m, order)
    alg = FormAlgebra(n, ring)
    d: Dict[int, Form] = {}
    for key, terms in obj.get("d", {}).items():
        i = int(key)
        total = alg.zero()
        for term in terms:
            factors = term.get("factors", [])
            if len(factors) != 2:
                raise FormatError("each structure term needs exactly two factors")
            parsed = [_parse_factor(fct, n) for fct in factors]
            bars = sum(1 for bar, _ in parsed if bar)
            if bars == 2:
                raise FormatError(
                    f"d gamma^{i} contains a (0,2)-factor pair {factors}; "
                    "the complex structure would not be integrable"
                )
            coeff = parse_scalar(term["coeff"], ring)
            piece = alg.scalar_form(coeff)
            for bar, idx in parsed:
                piece = piece.wedge(alg.gammabar(idx) if bar else alg.gamma(idx))
            total = total + piece
        d[i] = total
    return StructureEquations(name, alg, d)


def canonical_json(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def se_emit(se: StructureEquations) -> str:
    return canonical_json(se_to_obj(se))


def se_parse(text: str) -> StructureEquations:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    return obj_to_se(obj)


# -- forms -------------------------------------------------------------------


def form_to_obj(f: Form, name: Optional[str] = None) -> dict:
    alg = f.algebra
    obj = {"format": FORM_FORMAT, "n": alg.n, "m": alg.ring.m}
    if alg.ring.m:
        obj["truncation"] = alg.ring.order
    if name:
        obj["name"] = name
    terms = []
    for m in sorted(f.coeffs):
        I, J = m
        terms.append({"coeff": format_scalar(f.coeffs[m]), "I": list(I), "J": list(J)})
    obj["terms"] = terms
    return obj


def obj_to_form(obj: dict, algebra: Optional[FormAlgebra] = None) -> Form:
    if obj.get("format", FORM_FORMAT) != FORM_FORMAT:
        raise FormatError(f"unsupported form format {obj.get('format')!r}")
    n = int(obj["n"])
    m = int(obj.get("m", 0))
    order = int(obj.get("truncation", DEFAULT_TRUNCATION)) if m else 0
    alg = algebra or FormAlgebra(n, PolyRing(m, order))
    if alg.n != n:
        raise FormatError("form dimension does not match the target algebra")
    total = alg.zero()
    for term in obj.get("terms", []):
        coeff = parse_scalar(term["coeff"], alg.ring)
        total = total + alg.monomial(tuple(term["I"]), tuple(term["J"]), coeff)
    return total


def form_emit(f: Form, name: Optional[str] = None) -> str:
    return canonical_json(form_to_obj(f, name))


def form_parse(text: str, algebra: Optional[FormAlgebra] = None) -> Form:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    return obj_to_form(obj, algebra)


# -- Beltrami differentials ---------------------------------------------------


def beltrami_to_obj(phi: VectorValuedForm) -> dict:
    alg = phi.algebra
    obj = {
        "format": BELTRAMI_FORMAT,
        "n": alg.n,
        "m": alg.ring.m,
        "truncation": alg.ring.order,
        "components": {},
    }
    for i in sorted(phi.components):
        comp = phi.components[i]
        terms = []
        for m in sorted(comp.coeffs):
            I, J = m
            if I or len(J) != 1:
                raise FormatError("Beltrami components must be (0,1)-forms")
            terms.append({"coeff": format_scalar(comp.coeffs[m]), "factors": [f"bar{J[0]}"]})
        obj["components"][str(i)] = terms
    return obj


def obj_to_beltrami(obj: dict, algebra: Optional[FormAlgebra] = None) -> VectorValuedForm:
    if obj.get("format", BELTRAMI_FORMAT) != BELTRAMI_FORMAT:
        raise FormatError(f"unsupported Beltrami format {obj.get('format')!r}")
    n = int(obj["n"])
    m = int(obj.get("m", 0))
    order = int(obj.get("truncation", DEFAULT_TRUNCATION))
    alg = algebra or FormAlgebra(n, PolyRing(m, order))
    comps: Dict[int, Form] = {}
    for key, terms in obj.get("components", {}).items():
        i = int(key)
        total = alg.zero()
        for term in terms:
            factors = term.get("factors", [])
            if len(factors) != 1:
                raise FormatError("Beltrami terms carry exactly one coframe factor")
            bar, idx = _parse_factor(factors[0], n)
            if not bar:
                raise FormatError("Beltrami components must be (0,1)-forms")
            coeff = parse_scalar(term["coeff"], alg.ring)
            total = total + alg.monomial((), (idx,), coeff)
        comps[i] = total
    return VectorValuedForm(alg, T10, comps)


def beltrami_emit(phi: VectorValuedForm) -> str:
    return canonical_json(beltrami_to_obj(phi))


def beltrami_parse(text: str, algebra: Optional[FormAlgebra] = None) -> VectorValuedForm:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    return obj_to_beltrami(obj, algebra)
