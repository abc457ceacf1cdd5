from fractions import Fraction

import numpy as np
import pytest

from lagrangian_cubics.classifiers import binary, ternary
from lagrangian_cubics.classifiers.binary import BinaryLabel
from lagrangian_cubics.classifiers.extremes import (
    ExtremeKind,
    extreme_type,
    hesse_slice,
    margin,
    slice_cubic,
    sphere_grid,
)
from lagrangian_cubics.lc_core.errors import InvalidInputError
from lagrangian_cubics.lc_core.forms import LinearTransform, SymTensor, act, parse_form, polarize

EXPECTED = {
    BinaryLabel.ZERO: ExtremeKind.WEAK_EXTREME,
    BinaryLabel.PERFECT_CUBE: ExtremeKind.WEAK_EXTREME,
    BinaryLabel.SQUARE_TIMES_LINEAR: ExtremeKind.WEAK_EXTREME,
    BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC: ExtremeKind.EXTREME,
    BinaryLabel.THREE_DISTINCT_REAL_FACTORS: ExtremeKind.NEITHER,
}


@pytest.mark.parametrize("label", list(BinaryLabel))
def test_binary_normal_forms(label: BinaryLabel) -> None:
    verdict = extreme_type(polarize(binary.normal_form(label)), grid_density=400)
    assert verdict.kind is EXPECTED[label]


@pytest.mark.parametrize("label", list(BinaryLabel))
def test_binary_verdict_is_invariant_under_linear_changes(label: BinaryLabel) -> None:
    A = LinearTransform.from_rows([[2, -1], [1, 3]])
    verdict = extreme_type(polarize(act(binary.normal_form(label), A)), grid_density=400)
    assert verdict.kind is EXPECTED[label]


def test_extreme_witness_has_positive_margin() -> None:
    C = polarize(binary.normal_form(BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC))
    verdict = extreme_type(C, grid_density=400)
    entries = C.as_float().entries
    assert verdict.definiteness_margin > 0
    assert margin(entries, verdict.witness_direction) == pytest.approx(verdict.definiteness_margin)
    assert np.linalg.norm(verdict.witness_direction) == pytest.approx(1.0)


def test_zero_cubic_is_a_boundary_case() -> None:
    verdict = extreme_type(SymTensor.zeros(3, 3))
    assert verdict.kind is ExtremeKind.WEAK_EXTREME
    assert verdict.boundary
    assert verdict.as_record()["witness"] is None


def test_ternary_verdicts() -> None:
    assert extreme_type(polarize(parse_form("-(x**3 + y**3 + z**3)/6"))).kind is ExtremeKind.EXTREME
    assert extreme_type(polarize(parse_form("x*y*z"))).kind is ExtremeKind.NEITHER


@pytest.mark.parametrize("sigma", [Fraction(-2), Fraction(0), Fraction(1)])
def test_hesse_slices_are_extreme_or_weakly_extreme(sigma: Fraction) -> None:
    F = act(ternary.hesse_form(sigma), LinearTransform.from_rows([[1, 1, 0], [0, 1, 2], [1, 0, 1]]))
    C = hesse_slice(F)
    assert C.dim == 2
    assert extreme_type(C, grid_density=400).kind in (ExtremeKind.EXTREME, ExtremeKind.WEAK_EXTREME)


def test_slice_cubic() -> None:
    C = polarize(parse_form("x**3 + x*y*z + z**3"))
    S = slice_cubic(C, [0, 2])
    assert S.dim == 2
    assert S == polarize(parse_form("x**3 + y**3"))
    with pytest.raises(InvalidInputError):
        slice_cubic(C, [0, 0])
    with pytest.raises(InvalidInputError):
        slice_cubic(C, [])


def test_sphere_grid_is_on_the_unit_sphere() -> None:
    for n in (2, 3, 4):
        grid = sphere_grid(n, density=50)
        assert grid.shape == (50, n)
        assert np.allclose(np.linalg.norm(grid, axis=1), 1.0)


def test_extreme_type_needs_a_cubic() -> None:
    with pytest.raises(InvalidInputError):
        extreme_type(polarize(parse_form("x**2 + y**2")))
