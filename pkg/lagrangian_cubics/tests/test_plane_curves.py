from fractions import Fraction

import numpy as np
import pytest

from lagrangian_cubics.classifiers import plane_curves
from lagrangian_cubics.classifiers.ternary import TernaryLabel, hesse_form, normal_form
from lagrangian_cubics.lc_core.errors import InvalidInputError, NonConvergenceError
from lagrangian_cubics.lc_core.forms import LinearTransform, change_variables, parse_form
from lagrangian_cubics.lc_core.utils import make_rng, random_invertible_rational


def test_real_node_at_the_origin_of_the_chart() -> None:
    points, non_isolated = plane_curves.singular_points(normal_form(TernaryLabel.REAL_NODAL))
    assert not non_isolated
    [point] = points
    assert point.is_real
    assert point.local_type == plane_curves.NODE_REAL
    assert np.real(point.coords) == pytest.approx([0.0, 0.0, 1.0], abs=1e-9)


def test_imaginary_node_and_cusp() -> None:
    [node], _ = plane_curves.singular_points(normal_form(TernaryLabel.IMAGINARY_NODAL))
    assert node.local_type == plane_curves.NODE_IMAGINARY
    [cusp], _ = plane_curves.singular_points(normal_form(TernaryLabel.CUSPIDAL))
    assert cusp.local_type == plane_curves.CUSP
    assert cusp.hessian_rank == 1


def test_triangle_has_three_real_vertices() -> None:
    points, non_isolated = plane_curves.singular_points(parse_form("x*y*z"))
    assert not non_isolated
    assert len(points) == 3
    assert all(p.is_real for p in points)


def test_conic_and_line_meeting_in_complex_points() -> None:
    points, _ = plane_curves.singular_points(normal_form(TernaryLabel.LINEAR_TIMES_DEFINITE_QUAD))
    assert len(points) == 2
    assert not any(p.is_real for p in points)
    record = points[0].as_record()
    assert record["is_real"] is False
    assert len(record["coords"]) == 3


def test_double_line_is_not_isolated() -> None:
    _, non_isolated = plane_curves.singular_points(parse_form("x**2*y", dim=3))
    assert non_isolated


def test_nonsingular_curve_has_nine_flexes() -> None:
    F = hesse_form(Fraction(1))
    assert plane_curves.singular_points(F) == ([], False)
    flexes = plane_curves.flexes(F)
    assert len(flexes) == 9
    assert sum(plane_curves.is_real_point(p) for p in flexes) == 3
    G = F.as_float()
    for p in flexes:
        unit = p / np.linalg.norm(p)
        assert abs(G(unit)) < 1e-9


def test_hessian_curve_of_the_fermat_cubic() -> None:
    H = plane_curves.hessian_curve(parse_form("x**3 + y**3 + z**3"))
    assert H == parse_form("216*x*y*z")


@pytest.mark.parametrize("sigma, expected", [(Fraction(-3), 2), (Fraction(-1), 2), (Fraction(0), 1), (Fraction(2), 1)])
def test_circuit_sampling_agrees_with_the_hesse_parameter(sigma: Fraction, expected: int) -> None:
    assert plane_curves.count_circuits_by_sampling(hesse_form(sigma), lines=360, seed=5) == expected


def test_line_through_two_points() -> None:
    line = plane_curves.line_through(np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
    assert np.real(line) == pytest.approx([0.0, 0.0, 1.0])


def test_common_zeros_need_two_ternary_forms() -> None:
    with pytest.raises(InvalidInputError):
        plane_curves.common_zeros([parse_form("x*y*z")])
    with pytest.raises(InvalidInputError):
        plane_curves.singular_points(parse_form("x**3 + y**3"))


@pytest.mark.parametrize("seed", range(5))
def test_exact_zeros_are_reported_once(seed: int) -> None:
    T = LinearTransform(random_invertible_rational(3, make_rng(seed)))
    nodal = change_variables(normal_form(TernaryLabel.REAL_NODAL), T)
    assert len(plane_curves.singular_points(nodal)[0]) == 1
    triangle = change_variables(parse_form("x*y*z"), T)
    assert len(plane_curves.singular_points(triangle)[0]) == 3
    flexes = plane_curves.flexes(change_variables(hesse_form(Fraction(1)), T))
    assert len(flexes) == 9
    for i, p in enumerate(flexes):
        for q in flexes[i + 1 :]:
            assert np.linalg.matrix_rank(np.vstack([p, q]), tol=1e-6) == 2


def test_pencil_of_the_triangle_gradient_has_three_isolated_zeros() -> None:
    zeros = plane_curves.common_zeros(parse_form("x*y*z").gradient())
    assert not zeros.non_isolated
    assert len(zeros.points) == 3
    assert not zeros.ambiguous


def test_crowded_chart_is_not_accepted() -> None:
    with pytest.raises(NonConvergenceError):
        plane_curves.common_zeros([parse_form("x**2 - y**2"), parse_form("y**2 - z**2")], max_points=3)
