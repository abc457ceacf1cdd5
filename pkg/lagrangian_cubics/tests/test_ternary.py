from fractions import Fraction

import numpy as np
import pytest

from lagrangian_cubics.classifiers import plane_curves, ternary
from lagrangian_cubics.classifiers.ternary import (
    WITNESS_RESIDUAL_TOL,
    Stability,
    TernaryLabel,
    circuits,
    classify_ternary,
    critical_lines,
    discriminant_degree,
    hesse_form,
    hesse_normalize,
    is_singular,
    isotropy_samples,
    linear_factor,
    normal_form,
    stability,
    witness_residual,
)
from lagrangian_cubics.lc_core.errors import InvalidInputError, NonConvergenceError
from lagrangian_cubics.lc_core.forms import LinearTransform, act, change_variables, parse_form
from lagrangian_cubics.lc_core.utils import make_rng, random_invertible_rational

CONJUGATORS = [
    LinearTransform.from_rows([[1, 1, 0], [0, 1, 2], [1, 0, 1]]),
    LinearTransform.from_rows([[2, 0, 1], [1, 1, 0], [0, -1, 1]]),
]

SINGULAR_LABELS = [label for label in TernaryLabel if label is not TernaryLabel.NONSINGULAR]


@pytest.mark.parametrize("label", list(TernaryLabel))
def test_normal_forms_classify_to_their_own_label(label: TernaryLabel) -> None:
    result = classify_ternary(normal_form(label))
    assert result.label is label
    assert result.stability is stability(label)


@pytest.mark.parametrize("label", SINGULAR_LABELS)
def test_classification_is_invariant_under_rational_changes(label: TernaryLabel) -> None:
    for A in CONJUGATORS:
        F = act(normal_form(label), A)
        assert classify_ternary(F, witness=False).label is label


def test_essential_variables_are_reported() -> None:
    assert classify_ternary(normal_form(TernaryLabel.ZERO)).essential_variables == 0
    assert classify_ternary(normal_form(TernaryLabel.PERFECT_CUBE)).essential_variables == 1
    assert classify_ternary(normal_form(TernaryLabel.SQUARE_TIMES_INDEP_LINEAR)).essential_variables == 2
    assert classify_ternary(normal_form(TernaryLabel.CUSPIDAL)).essential_variables == 3


def test_stability_levels() -> None:
    assert stability(TernaryLabel.NONSINGULAR) is Stability.STABLE
    assert stability(TernaryLabel.REAL_NODAL) is Stability.SEMISTABLE
    assert stability(TernaryLabel.IMAGINARY_NODAL) is Stability.SEMISTABLE
    assert stability(TernaryLabel.CUSPIDAL) is Stability.UNSTABLE
    assert stability(TernaryLabel.THREE_INDEPENDENT_FACTORS) is Stability.UNSTABLE


def test_fermat_cubic_is_nonsingular_with_one_circuit() -> None:
    result = classify_ternary(parse_form("x**3 + y**3 + z**3"))
    assert result.label is TernaryLabel.NONSINGULAR
    assert result.sigma == pytest.approx(0.0, abs=1e-8)
    assert result.circuits == 1


@pytest.mark.parametrize("sigma, expected", [(Fraction(-2), 2), (Fraction(-1), 2), (Fraction(1, 4), 1), (Fraction(3), 1)])
def test_hesse_parameter_is_recovered_after_a_change_of_variables(sigma: Fraction, expected: int) -> None:
    F = act(hesse_form(sigma), CONJUGATORS[0])
    result = classify_ternary(F)
    assert result.label is TernaryLabel.NONSINGULAR
    assert result.sigma == pytest.approx(float(sigma), abs=1e-6)
    assert result.circuits == expected
    image = change_variables(F.as_float(), result.witness)
    assert (image - hesse_form(float(result.sigma))).max_abs() < 1e-6


def test_hesse_normalize_of_the_normal_form_is_near_identity() -> None:
    normalization = hesse_normalize(hesse_form(Fraction(1)))
    assert normalization.sigma == pytest.approx(1.0, abs=1e-8)
    assert normalization.sigma_set == (normalization.sigma,)
    assert normalization.residual < 1e-9


def test_singular_hesse_parameter_is_rejected() -> None:
    with pytest.raises(InvalidInputError):
        normal_form(TernaryLabel.NONSINGULAR, Fraction(-1, 2))
    assert classify_ternary(hesse_form(Fraction(-1, 2))).label is TernaryLabel.LINEAR_TIMES_INDEP_SEMIDEF_QUAD


def test_circuits_of_hesse_forms() -> None:
    assert circuits(hesse_form(Fraction(-1))) == 2
    assert circuits(hesse_form(Fraction(1))) == 1


def test_triangle_witness() -> None:
    F = act(normal_form(TernaryLabel.THREE_INDEPENDENT_FACTORS), CONJUGATORS[1])
    result = classify_ternary(F)
    image = change_variables(F.as_float(), result.witness)
    assert (image - parse_form("x*y*z").as_float()).max_abs() < 1e-9


@pytest.mark.parametrize(
    "label",
    [TernaryLabel.REAL_NODAL, TernaryLabel.IMAGINARY_NODAL, TernaryLabel.SPLIT_LINEAR_TIMES_LORENTZ_QUAD],
)
def test_float_input_is_classified_by_its_singular_points(label: TernaryLabel) -> None:
    F = act(normal_form(label), CONJUGATORS[0]).as_float()
    assert classify_ternary(F, witness=False).label is label


def test_linear_factor_exact_and_float() -> None:
    F = normal_form(TernaryLabel.SPLIT_LINEAR_TIMES_LORENTZ_QUAD)
    L, Q = linear_factor(F)
    assert L * Q == F
    G = act(F, CONJUGATORS[1]).as_float()
    L, Q = linear_factor(G)
    assert (L * Q - G).max_abs() < 1e-8
    assert linear_factor(hesse_form(Fraction(1))) is None


def test_is_singular() -> None:
    assert not is_singular(hesse_form(Fraction(0)))
    assert is_singular(normal_form(TernaryLabel.CUSPIDAL))
    assert is_singular(parse_form("x**2*y"))
    assert not is_singular(parse_form("x**3 + y**3"))


def test_critical_lines_of_the_real_node() -> None:
    [(point, real)] = critical_lines(normal_form(TernaryLabel.REAL_NODAL))
    assert real
    assert np.real(point) == pytest.approx([0.0, 0.0, 1.0], abs=1e-9)
    assert critical_lines(hesse_form(Fraction(1))) == []


@pytest.mark.parametrize("label", list(TernaryLabel))
def test_isotropy_samples_fix_the_normal_form(label: TernaryLabel) -> None:
    N = normal_form(label)
    for g in isotropy_samples(label):
        assert change_variables(N, g) == N


def test_discriminant_degree() -> None:
    assert discriminant_degree(2) == 4
    assert discriminant_degree(3) == 12
    assert discriminant_degree(4) == 32


def _random_conjugates(label: TernaryLabel, count: int, seed: int) -> list:
    rng = make_rng(seed)
    N = normal_form(label, Fraction(1))
    return [change_variables(N, LinearTransform(random_invertible_rational(3, rng))) for _ in range(count)]


@pytest.mark.parametrize("label", list(TernaryLabel))
def test_every_rational_conjugate_is_recovered_exactly(label: TernaryLabel) -> None:
    for F in _random_conjugates(label, 100, seed=11):
        assert classify_ternary(F, witness=False).label is label


def test_float_conjugates_are_recovered_and_every_miss_is_flagged() -> None:
    total, misses, unflagged = 0, 0, []
    for index, label in enumerate(TernaryLabel):
        for F in _random_conjugates(label, 40, seed=100 + index):
            total += 1
            try:
                result = classify_ternary(F.as_float(), witness=False)
            except NonConvergenceError:
                misses += 1
                unflagged.append(label)
                continue
            if result.label is not label:
                misses += 1
                if not result.near_degenerate:
                    unflagged.append(label)
    assert misses <= total // 100
    assert unflagged == []


@pytest.mark.parametrize("scale", [1e-3, 1.0, 1e3])
def test_float_classification_does_not_depend_on_the_scale(scale: float) -> None:
    for label in (TernaryLabel.REAL_NODAL, TernaryLabel.IMAGINARY_NODAL, TernaryLabel.DEF_LINEAR_TIMES_LORENTZ_QUAD):
        F = act(normal_form(label), CONJUGATORS[1]).as_float()
        reference = classify_ternary(F, witness=False)
        result = classify_ternary(F * scale, witness=False)
        assert result.label is label
        assert result.near_degenerate == reference.near_degenerate


def test_conic_close_to_a_line_pair_is_flagged() -> None:
    F = parse_form("x*(y**2 - z**2) + x**3/1000000").as_float()
    result = classify_ternary(F, witness=False)
    assert result.label in (TernaryLabel.SPLIT_LINEAR_TIMES_LORENTZ_QUAD, TernaryLabel.THREE_INDEPENDENT_FACTORS)
    assert result.near_degenerate


def test_sigma_does_not_depend_on_the_order_of_the_flexes() -> None:
    F = act(hesse_form(Fraction(-2)), CONJUGATORS[0])
    points = plane_curves.flexes(F)
    forward = hesse_normalize(F, points)
    backward = hesse_normalize(F, points[::-1])
    rotated = hesse_normalize(F, points[4:] + points[:4])
    assert forward.sigma == pytest.approx(-2.0, abs=1e-6)
    assert backward.sigma == pytest.approx(forward.sigma, abs=1e-9)
    assert rotated.sigma == pytest.approx(forward.sigma, abs=1e-9)
    assert forward.sigma == min(forward.sigma_set)


def test_classification_retries_in_new_coordinates(monkeypatch: pytest.MonkeyPatch) -> None:
    original = ternary._classify_by_singular_points
    calls = []

    def fail_once(F, witness):
        calls.append(F)
        if len(calls) == 1:
            raise NonConvergenceError("unsettled")
        return original(F, witness)

    monkeypatch.setattr(ternary, "_classify_by_singular_points", fail_once)
    F = act(normal_form(TernaryLabel.THREE_INDEPENDENT_FACTORS), CONJUGATORS[0]).as_float()
    result = classify_ternary(F)
    assert len(calls) == 2
    assert result.label is TernaryLabel.THREE_INDEPENDENT_FACTORS
    assert result.witness_verified
    G = F.gradient()
    for point in result.singular_points:
        unit = np.real(point.coords) / np.linalg.norm(np.real(point.coords))
        assert max(abs(g(unit)) for g in G) < 1e-6
    product = result.factors[0] * result.factors[1] * result.factors[2]
    ratio = F.max_abs() / product.max_abs()
    assert (product * ratio - F).max_abs() < 1e-6 or (product * ratio + F).max_abs() < 1e-6


def test_hesse_normalization_retries_in_new_coordinates(monkeypatch: pytest.MonkeyPatch) -> None:
    original = ternary._normalize_from_flexes
    calls = []

    def fail_once(F, points):
        calls.append(F)
        if len(calls) == 1:
            raise NonConvergenceError("flexes not resolved")
        return original(F, points)

    monkeypatch.setattr(ternary, "_normalize_from_flexes", fail_once)
    F = act(hesse_form(Fraction(1, 4)), CONJUGATORS[1])
    normalization = hesse_normalize(F)
    assert len(calls) == 2
    assert normalization.sigma == pytest.approx(0.25, abs=1e-6)
    image = change_variables(F.as_float(), normalization.transform)
    assert (image - hesse_form(normalization.sigma)).max_abs() < 1e-6


def test_witness_residual_is_recorded_on_the_result() -> None:
    F = act(normal_form(TernaryLabel.THREE_INDEPENDENT_FACTORS), CONJUGATORS[1])
    result = classify_ternary(F)
    assert result.witness_residual is not None
    assert result.witness_residual <= WITNESS_RESIDUAL_TOL
    assert result.witness_verified
    unchecked = classify_ternary(F, witness=False)
    assert unchecked.witness_residual is None
    assert not unchecked.witness_verified
    assert classify_ternary(normal_form(TernaryLabel.ZERO)).witness_residual == 0.0


def test_witness_residual_exposes_a_wrong_transform() -> None:
    F = act(normal_form(TernaryLabel.THREE_INDEPENDENT_FACTORS), CONJUGATORS[1])
    error = witness_residual(F, LinearTransform.identity(3), normal_form(TernaryLabel.THREE_INDEPENDENT_FACTORS))
    assert error > WITNESS_RESIDUAL_TOL
