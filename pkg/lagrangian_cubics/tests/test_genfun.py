from fractions import Fraction

import numpy as np
import pytest

from lagrangian_cubics.classifiers.binary import BinaryLabel, classify_binary
from lagrangian_cubics.classifiers.ternary import TernaryLabel, classify_ternary, divide_by_line, is_singular
from lagrangian_cubics.lc_core.errors import InvalidInputError
from lagrangian_cubics.lc_core.forms import HomogeneousForm, LinearTransform, act, parse_form
from lagrangian_cubics.lc_core.genfun import (
    GeneratingJet,
    LagrangianPatch,
    action_integral,
    apply_gl,
    apply_shear,
    circle_loop,
    clifford_torus_jet,
    cubic_invariant,
    example1_loop,
    example2_loop,
    finite_difference_S3,
    frame_check,
    jet_from_patch,
    shear_by_series,
    singular_example_jet,
    singular_example_patch,
)


def _quartic_patch() -> LagrangianPatch:
    return LagrangianPatch.from_expression(
        "q1**3/6 + q1*q2**2 - q2**3/3 + q1**4/24 + q1**2*q2**2/2 - q1*q2**3", 2
    )


def test_jet_from_polynomial_patch_is_exact() -> None:
    jet = jet_from_patch(_quartic_patch(), [0, 0])
    assert jet.is_exact
    assert cubic_invariant(jet) == parse_form("x**3/6 + x*y**2 - y**3/3")
    assert jet.S4[(0, 0, 0, 0)] == 1
    assert jet.S4[(0, 0, 1, 1)] == 2
    assert jet.S4[(0, 1, 1, 1)] == -6


def test_shear_keeps_the_cubic_and_matches_the_series_solution() -> None:
    jet = jet_from_patch(_quartic_patch(), [0, 0])
    B = [[Fraction(1, 2), Fraction(-1, 3)], [Fraction(-1, 3), 2]]
    sheared = apply_shear(jet, B)
    assert sheared.S3 == jet.S3
    assert sheared.S4 == shear_by_series(jet, B).S4


def test_shear_on_random_jets() -> None:
    rng = np.random.default_rng(3)
    for _ in range(5):
        coeffs = rng.integers(-3, 4, size=4)
        F = HomogeneousForm(2, 3, {(3 - k, k): int(c) for k, c in enumerate(coeffs)})
        jet = GeneratingJet.from_cubic(F)
        b = rng.integers(-2, 3, size=3)
        B = [[int(b[0]), int(b[1])], [int(b[1]), int(b[2])]]
        sheared = apply_shear(jet, B)
        assert cubic_invariant(sheared) == F
        assert sheared.S4 == shear_by_series(jet, B).S4


def test_shear_rejects_asymmetric_matrix() -> None:
    jet = GeneratingJet.from_cubic(parse_form("x**3 + y**3"))
    with pytest.raises(InvalidInputError):
        apply_shear(jet, [[1, 2], [0, 1]])


def test_linear_change_acts_contragrediently() -> None:
    F = parse_form("x**2*y/2 - y**3/6")
    A = LinearTransform.from_rows([[2, 1], [1, 1]])
    jet = apply_gl(GeneratingJet.from_cubic(F), A)
    assert cubic_invariant(jet) == act(F, A)
    assert classify_binary(cubic_invariant(jet)).label is classify_binary(F).label


def test_frame_check_recovers_the_third_derivatives() -> None:
    patch = _quartic_patch()
    q0 = [Fraction(1, 2), Fraction(-1)]
    jet = jet_from_patch(patch, q0)
    sample = frame_check(patch, q0)
    assert sample.max_residual(jet.S3) == 0.0


def test_finite_differences_agree_with_symbolic_jet() -> None:
    patch = _quartic_patch()
    jet = jet_from_patch(patch, [0.3, -0.2])
    numeric = finite_difference_S3(patch, [0.3, -0.2])
    assert np.max(np.abs(numeric - jet.S3.as_float().entries)) < 1e-6


def test_clifford_torus_cubic_in_two_and_three_dimensions() -> None:
    jet2 = clifford_torus_jet([1, 1])
    F2 = cubic_invariant(jet2)
    assert F2 == parse_form("-(x**3 + y**3)/6")
    cls2 = classify_binary(F2)
    assert cls2.label is BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC
    assert cls2.discriminant == Fraction(1, 1296)

    cls3 = classify_ternary(cubic_invariant(clifford_torus_jet([1, 1, 1])))
    assert cls3.label is TernaryLabel.NONSINGULAR
    assert float(cls3.sigma) == pytest.approx(0.0, abs=1e-8)


def test_clifford_radii_scale_the_cubic() -> None:
    F = cubic_invariant(clifford_torus_jet([2, Fraction(1, 2)]))
    assert F == parse_form("-x**3/12 - y**3/3")


def test_patch_is_lagrangian() -> None:
    assert _quartic_patch().is_lagrangian([[0, 0], [0.5, -0.25]])


def test_singular_example_one_has_a_linear_factor_along_the_ray() -> None:
    rng = np.random.default_rng(11)
    for _ in range(5):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        q0 = list(rng.uniform(1.2, 1.8) * direction)
        F = cubic_invariant(singular_example_jet(1, (2, 1), q0))
        _, residual = divide_by_line(F, q0)
        assert residual < 1e-8
        assert is_singular(F, tol=1e-7)


def test_singular_example_two_is_a_perfect_cube() -> None:
    F = cubic_invariant(singular_example_jet(2, (1, 0), [0, Fraction(1, 3), Fraction(1, 4)]))
    assert F == parse_form("-x**3/6", dim=3)
    assert is_singular(F)


def test_singular_example_domains() -> None:
    patch = singular_example_patch(1, (2, 1), 2)
    assert patch.contains([1.5, 0.0])
    assert not patch.contains([0.5, 0.0])
    with pytest.raises(InvalidInputError):
        jet_from_patch(patch, [0.5, 0.0])
    with pytest.raises(InvalidInputError):
        singular_example_patch(1, (1, 2), 2)


def test_circle_action_is_signed_area() -> None:
    assert action_integral(circle_loop(1.0)) == pytest.approx(-np.pi, abs=1e-9)
    assert abs(action_integral(circle_loop(2.0))) == pytest.approx(4 * np.pi, abs=1e-4)


def test_action_of_sampled_polygon() -> None:
    ts = np.linspace(0.0, 1.0, 20001)
    samples = np.column_stack([np.cos(2 * np.pi * ts), np.sin(2 * np.pi * ts)])
    assert action_integral(samples) == pytest.approx(-np.pi, abs=1e-4)


def test_open_loop_is_rejected() -> None:
    with pytest.raises(InvalidInputError):
        action_integral(lambda t: np.array([t, 0.0]))


def test_singular_example_cycles_are_exact() -> None:
    assert abs(action_integral(example1_loop(2.0, 1.0, n=2))) < 1e-6
    assert abs(action_integral(example1_loop(2.0, 0.5, n=3))) < 1e-6
    assert action_integral(example2_loop(1.5, [0.2, 0.1])) == pytest.approx(-np.pi * 1.5**2, abs=1e-9)
