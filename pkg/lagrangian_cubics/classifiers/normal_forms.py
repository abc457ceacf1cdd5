"""Named built-in inputs: every normal form plus a few distinguished examples."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from ..lc_core.errors import InvalidInputError
from ..lc_core.forms import HomogeneousForm
from ..lc_core.genfun import LagrangianPatch
from ..lc_core.records import SCHEMA_VERSION, form_from_record, form_to_record, patch_from_record
from . import binary, ternary
from .binary import BinaryLabel
from .ternary import TernaryLabel

FORM = "form"
PATCH = "patch"


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str
    record: dict[str, Any]
    description: str = ""

    def form(self) -> HomogeneousForm:
        if self.kind != FORM:
            raise InvalidInputError(f"fixture {self.name!r} is a {self.kind}, not a form")
        return form_from_record(self.record)

    def patch(self) -> LagrangianPatch:
        if self.kind == FORM:
            return LagrangianPatch.from_form(self.form(), name=self.name)
        return patch_from_record(self.record)


def _form_fixture(name: str, builder: Callable[[], HomogeneousForm], description: str) -> Fixture:
    return Fixture(name, FORM, form_to_record(builder()), description)


def _clifford(n: int) -> Fixture:
    record = {"schema": SCHEMA_VERSION, "patch": "clifford", "radii": [1] * n}
    return Fixture(f"clifford{n}", PATCH, record, f"Clifford torus with unit radii, n = {n}")


def _build_registry() -> dict[str, Fixture]:
    registry: dict[str, Fixture] = {}
    for label in BinaryLabel:
        name = f"binary_{label.value}"
        registry[name] = _form_fixture(name, lambda label=label: binary.normal_form(label), f"binary {label.value}")
    for label in TernaryLabel:
        registry[label.value] = _form_fixture(
            label.value, lambda label=label: ternary.normal_form(label), f"ternary {label.value}"
        )
    registry["fermat"] = _form_fixture("fermat", lambda: ternary.hesse_form(Fraction(0)), "Hesse form, sigma = 0")
    registry["hesse_sigma1"] = _form_fixture(
        "hesse_sigma1", lambda: ternary.hesse_form(Fraction(1)), "Hesse form, sigma = 1"
    )
    for n in (2, 3):
        fixture = _clifford(n)
        registry[fixture.name] = fixture
    return registry


FIXTURES: dict[str, Fixture] = _build_registry()


def fixture_names() -> list[str]:
    return sorted(FIXTURES)


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise InvalidInputError(f"unknown fixture {name!r}; choose from {', '.join(fixture_names())}") from None
