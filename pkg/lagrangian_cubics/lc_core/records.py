"""JSON records for forms, tensors, transforms and patches."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path
import sys
from typing import Any, Mapping, Optional, Union

import numpy as np

from . import linalg
from .errors import InvalidInputError
from .forms import (
    EXACT,
    FLOAT,
    HomogeneousForm,
    LinearTransform,
    multinomial_weight,
    parse_form,
)
from .genfun import LagrangianPatch, clifford_torus_patch, singular_example_patch
from .utils import as_fraction, is_exact_scalar

SCHEMA_VERSION = "v1"
POLYNOMIAL = "polynomial"
TENSOR = "tensor"
CONVENTIONS = (POLYNOMIAL, TENSOR)


def scalar_to_json(value: Any) -> Union[str, float, int]:
    """Exact scalars become ``"p/q"`` strings (integers stay integers); floats stay floats."""

    if is_exact_scalar(value):
        value = as_fraction(value)
        return value.numerator if value.denominator == 1 else str(value)
    return float(value)


def scalar_from_json(value: Any) -> Union[Fraction, float]:
    if isinstance(value, float):
        return value
    return as_fraction(value)


def array_to_json(array: np.ndarray) -> list[Any]:
    array = np.asarray(array, dtype=object)
    if array.ndim == 0:
        return scalar_to_json(array.item())
    return [array_to_json(row) for row in array]


def array_from_json(values: Any) -> np.ndarray:
    array = np.asarray(values, dtype=object)
    if any(isinstance(v, float) for v in array.ravel()):
        return linalg.as_float_array(array)
    return linalg.as_exact_array(array)


def form_to_record(F: HomogeneousForm, convention: str = POLYNOMIAL) -> dict[str, Any]:
    """Serialize as ``{schema, dim, degree, convention, terms: [{exp, c}]}``.

    Under the tensor convention ``c`` is the polarized entry ``S_{i1..id}``.
    """

    if convention not in CONVENTIONS:
        raise InvalidInputError(f"unknown convention {convention!r}")
    terms = []
    for exp, c in F.terms():
        if convention == TENSOR:
            c = c * multinomial_weight(exp)
        terms.append({"exp": list(exp), "c": scalar_to_json(c)})
    return {
        "schema": SCHEMA_VERSION,
        "dim": F.dim,
        "degree": F.degree,
        "convention": convention,
        "terms": terms,
    }


def form_from_record(record: Mapping[str, Any]) -> HomogeneousForm:
    """Accepts a term record or ``{"expr": "...", "dim": n}``."""

    _check_schema(record)
    try:
        if "expr" in record:
            return parse_form(str(record["expr"]), record.get("dim"), record.get("mode"))
        dim, degree = int(record["dim"]), int(record["degree"])
        convention = record.get("convention", POLYNOMIAL)
        if convention not in CONVENTIONS:
            raise InvalidInputError(f"unknown convention {convention!r}")
        coeffs: dict[tuple[int, ...], Any] = {}
        for term in record.get("terms", []):
            exp = tuple(int(e) for e in term["exp"])
            value = scalar_from_json(term["c"])
            if convention == TENSOR:
                value = value / multinomial_weight(exp)
            coeffs[exp] = coeffs.get(exp, 0) + value
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"malformed form record: {exc}") from exc
    mode = FLOAT if any(isinstance(v, float) for v in coeffs.values()) else EXACT
    return HomogeneousForm(dim, degree, coeffs, mode)


def transform_to_record(T: Optional[LinearTransform]) -> Optional[list[Any]]:
    return None if T is None else array_to_json(T.matrix)


def transform_from_record(values: Any) -> LinearTransform:
    return LinearTransform(array_from_json(values))


def patch_from_record(record: Mapping[str, Any]) -> LagrangianPatch:
    """``{"patch": "clifford", "radii": [..]}``, ``{"patch": "singular1", "R": .., "r": .., "n": ..}``,
    ``{"expr": "...", "dim": n}`` for a generating function in ``q1..qn``, or a
    polynomial given by ``terms`` as in a form record (any degrees)."""

    _check_schema(record)
    name = record.get("patch")
    try:
        if name == "clifford":
            return clifford_torus_patch([scalar_from_json(r) for r in record["radii"]])
        if name in ("singular1", "singular2"):
            params = (scalar_from_json(record["R"]), scalar_from_json(record.get("r", 0)))
            return singular_example_patch(int(name[-1]), params, int(record.get("n", 2)))
        if "expr" in record:
            return LagrangianPatch.from_expression(str(record["expr"]), int(record["dim"]))
        if "terms" in record:
            terms = {tuple(int(e) for e in t["exp"]): scalar_from_json(t["c"]) for t in record["terms"]}
            return LagrangianPatch.from_polynomial(int(record["dim"]), terms)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed patch record: {exc}") from exc
    raise InvalidInputError(f"unknown patch record {dict(record)!r}")


def _check_schema(record: Mapping[str, Any]) -> None:
    if not isinstance(record, Mapping):
        raise InvalidInputError("record must be a JSON object")
    schema = record.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise InvalidInputError(f"unsupported schema {schema!r}")


def read_json(source: Union[str, Path]) -> Any:
    """Load JSON from a path, or from stdin for ``"-"``."""

    try:
        if str(source) == "-":
            return json.load(sys.stdin)
        return json.loads(Path(source).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read JSON from {source}: {exc}") from exc


def dumps(document: Any) -> str:
    return json.dumps(document, indent=2)


def digest(document: Any) -> str:
    """SHA-256 of the canonical JSON text of ``document``."""

    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
