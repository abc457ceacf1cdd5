from fractions import Fraction
import json
from pathlib import Path

import numpy as np
import pytest

from lagrangian_cubics.classifiers.normal_forms import fixture_names, get_fixture
from lagrangian_cubics.lc_core.errors import InvalidInputError
from lagrangian_cubics.lc_core.forms import FLOAT, LinearTransform, parse_form
from lagrangian_cubics.lc_core.records import (
    TENSOR,
    digest,
    form_from_record,
    form_to_record,
    patch_from_record,
    read_json,
    scalar_to_json,
    transform_from_record,
    transform_to_record,
)


def test_scalars_keep_their_exactness() -> None:
    assert scalar_to_json(Fraction(3)) == 3
    assert scalar_to_json(Fraction(-1, 6)) == "-1/6"
    assert scalar_to_json(0.25) == 0.25


def test_polynomial_convention() -> None:
    F = parse_form("x**3/6 + x*y**2")
    record = form_to_record(F)
    assert record["convention"] == "polynomial"
    assert record["terms"] == [{"exp": [3, 0], "c": "1/6"}, {"exp": [1, 2], "c": 1}]
    assert form_from_record(record) == F


def test_tensor_convention_stores_polarized_entries() -> None:
    F = parse_form("x**3/6 + x*y**2")
    record = form_to_record(F, TENSOR)
    assert record["terms"] == [{"exp": [3, 0], "c": 1}, {"exp": [1, 2], "c": 2}]
    assert form_from_record(record) == F


def test_expression_and_float_records() -> None:
    assert form_from_record({"expr": "x**3 + y**3", "dim": 3}) == parse_form("x**3 + y**3", dim=3)
    F = form_from_record({"dim": 2, "degree": 3, "terms": [{"exp": [3, 0], "c": 0.5}]})
    assert F.scalar_mode == FLOAT


@pytest.mark.parametrize(
    "record",
    [
        {"dim": 2},
        {"schema": "v2", "dim": 2, "degree": 3, "terms": []},
        {"dim": 2, "degree": 3, "convention": "weights", "terms": []},
        {"dim": 2, "degree": 3, "terms": [{"exp": [2, 0], "c": 1}]},
        {"dim": 2, "degree": 3, "terms": [{"exp": [3, 0], "c": "one"}]},
        [1, 2, 3],
    ],
)
def test_malformed_form_records(record: object) -> None:
    with pytest.raises(InvalidInputError):
        form_from_record(record)


def test_transform_records() -> None:
    T = LinearTransform.from_rows([[1, Fraction(1, 2)], [0, 2]])
    values = transform_to_record(T)
    assert values == [[1, "1/2"], [0, 2]]
    assert np.array_equal(transform_from_record(values).matrix, T.matrix)
    assert transform_to_record(None) is None


def test_patch_records() -> None:
    assert patch_from_record({"patch": "clifford", "radii": [1, 1]}).dim == 2
    assert patch_from_record({"expr": "q1**3/6", "dim": 1}).dim == 1
    with pytest.raises(InvalidInputError):
        patch_from_record({"patch": "sphere"})
    with pytest.raises(InvalidInputError):
        patch_from_record({"patch": "clifford"})


def test_digest_ignores_key_order() -> None:
    assert digest({"a": 1, "b": [1, 2]}) == digest({"b": [1, 2], "a": 1})
    assert digest({"a": 1}) != digest({"a": 2})


def test_read_json(tmp_path: Path) -> None:
    path = tmp_path / "form.json"
    path.write_text(json.dumps(form_to_record(parse_form("x*y*z"))))
    assert form_from_record(read_json(path)) == parse_form("x*y*z")
    with pytest.raises(InvalidInputError):
        read_json(tmp_path / "missing.json")


def test_every_fixture_loads() -> None:
    for name in fixture_names():
        fixture = get_fixture(name)
        assert fixture.patch().dim in (2, 3)
    assert get_fixture("fermat").form() == parse_form("x**3 + y**3 + z**3")
    with pytest.raises(InvalidInputError):
        get_fixture("octahedron")
    with pytest.raises(InvalidInputError):
        get_fixture("clifford2").form()
