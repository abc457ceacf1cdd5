from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from lagrangian_cubics.lc_core.dynamics import (
    AffineSymplecticElement,
    CurveKind,
    QuadraticHamiltonian,
    affinity_defect,
    bracket_oracle,
    commuting_family,
    darboux_diagonalize,
    flow,
    flow_element,
    hamiltonian_matrix,
    hamiltonian_symbols,
    homogeneous_curve,
    is_flow_affine,
    j_map,
    lagrangian_grassmannian_dims,
    poisson_bracket,
    random_hamiltonian,
    rk4_flow,
    stabilizer_element,
    symplectic_pairing,
    unused_variables,
)
from lagrangian_cubics.lc_core.errors import InvalidInputError, NonGenericInputError
from lagrangian_cubics.lc_core.forms import parse_form, polarize

QUADRATIC = "q1**2/2 + q1*p2 + p1**2 - p2**2/2 + 3*q2 - p1/2"


def _symplectic_conjugate(A: np.ndarray) -> np.ndarray:
    L = stabilizer_element([[1, 1], [0, 2]], [[1, 0], [0, -1]]).matrix()[:4, :4]
    return L.T @ A @ L


def test_j_map_and_symplectic_pairing() -> None:
    J = j_map(2)
    assert np.array_equal(J @ J, -np.eye(4, dtype=int))
    assert symplectic_pairing([1, 0, 0, 0], [0, 0, 1, 0]) == 1.0
    assert symplectic_pairing([0, 0, 1, 0], [1, 0, 0, 0]) == -1.0
    with pytest.raises(InvalidInputError):
        j_map(0)


def test_from_polynomial_reads_off_the_parts() -> None:
    h = QuadraticHamiltonian.from_polynomial("q1*p1 + 2*p1 - 3", 1)
    assert h.A[0, 1] == h.A[1, 0] == 1
    assert list(h.xi) == [0, 2]
    assert h.c == -3
    q1, p1 = hamiltonian_symbols(1)
    assert sp.expand(h.to_sympy() - (q1 * p1 + 2 * p1 - 3)) == 0


def test_from_polynomial_rejects_cubic_and_foreign_symbols() -> None:
    with pytest.raises(InvalidInputError):
        QuadraticHamiltonian.from_polynomial("q1**3 + p1", 1)
    with pytest.raises(InvalidInputError):
        QuadraticHamiltonian.from_polynomial("q1 + x", 1)
    with pytest.raises(InvalidInputError):
        QuadraticHamiltonian([[1, 2], [0, 1]], [0, 0])


def test_bracket_of_momentum_and_position() -> None:
    P = QuadraticHamiltonian.from_polynomial("p1", 1)
    Q = QuadraticHamiltonian.from_polynomial("q1", 1)
    bracket = poisson_bracket(P, Q)
    assert bracket.c == 1
    assert not np.any(bracket.A != 0)
    assert bracket_oracle(P, Q).c == 1


def test_bracket_formula_matches_the_symbolic_oracle() -> None:
    rng = np.random.default_rng(0)
    for _ in range(20):
        f, g = random_hamiltonian(2, rng), random_hamiltonian(2, rng)
        assert poisson_bracket(f, g).max_abs_difference(bracket_oracle(f, g)) < 1e-9
    poisson_bracket(f, g, check=True)


def test_exact_bracket_matches_the_oracle_exactly() -> None:
    f = QuadraticHamiltonian.from_polynomial(QUADRATIC, 2)
    g = QuadraticHamiltonian.from_polynomial("q1*q2 - p1**2/3 + q2/2 + 1", 2)
    assert poisson_bracket(f, g).max_abs_difference(bracket_oracle(f, g)) == 0.0


def test_jacobi_identity() -> None:
    rng = np.random.default_rng(1)
    f, g, h = (random_hamiltonian(2, rng) for _ in range(3))
    total = (
        poisson_bracket(f, poisson_bracket(g, h))
        + poisson_bracket(g, poisson_bracket(h, f))
        + poisson_bracket(h, poisson_bracket(f, g))
    )
    assert total.max_abs_difference(QuadraticHamiltonian.zero(2)) < 1e-9


def test_hamiltonian_matrix_is_an_anti_homomorphism() -> None:
    rng = np.random.default_rng(2)
    f, g = random_hamiltonian(2, rng), random_hamiltonian(2, rng)
    Mf, Mg = hamiltonian_matrix(f), hamiltonian_matrix(g)
    block = hamiltonian_matrix(poisson_bracket(f, g))[:5, :5]
    assert np.max(np.abs(block + (Mf @ Mg - Mg @ Mf)[:5, :5])) < 1e-9


def test_harmonic_oscillator_is_periodic() -> None:
    f = QuadraticHamiltonian.from_polynomial("(q1**2 + p1**2)/2", 1)
    x0 = np.array([0.7, -0.3])
    assert np.max(np.abs(flow(f, 2 * np.pi, x0) - x0)) < 1e-9
    assert flow(f, np.pi / 2, [1.0, 0.0]) == pytest.approx([0.0, -1.0], abs=1e-12)


@pytest.mark.parametrize("t", [0.25, 0.5, 1.0])
def test_exponential_flow_agrees_with_runge_kutta(t: float) -> None:
    f = QuadraticHamiltonian.from_polynomial(QUADRATIC, 2)
    x0 = [0.3, -0.1, 0.5, 0.2]
    assert np.max(np.abs(flow(f, t, x0) - rk4_flow(QUADRATIC, 2, x0, t))) < 1e-8


def test_affinity_of_flows() -> None:
    q1, p1 = hamiltonian_symbols(1)
    assert is_flow_affine("q1**2 + 3*p1 - 1", (q1, p1))
    assert not is_flow_affine("q1**3 + p1**2/2", (q1, p1))
    assert affinity_defect("q1**3 + p1**2/2", 1, [0.5, 0.0], [-0.5, 0.3]) > 1e-4
    assert affinity_defect("q1*p1 + p1**2/2 - q1", 1, [0.5, 0.0], [-0.5, 0.3]) < 1e-9


def test_darboux_form_of_a_diagonal_matrix_is_the_identity() -> None:
    result = darboux_diagonalize(np.diag([1.0, 2.0, 3.0, 5.0]))
    assert np.max(np.abs(result.transform - np.eye(4))) < 1e-8
    assert result.diagonal == pytest.approx((1.0, 3.0, 2.0, 5.0))
    assert result.elliptic == (True, True)


@pytest.mark.parametrize("diagonal", [[1.0, 2.0, 3.0, 5.0], [1.0, -2.0, 3.0, 5.0]])
def test_darboux_products_survive_a_symplectic_change(diagonal: list) -> None:
    A = _symplectic_conjugate(np.diag(diagonal))
    result = darboux_diagonalize(A)
    expected = sorted(diagonal[k] * diagonal[k + 2] for k in range(2))
    assert sorted(result.a * result.b) == pytest.approx(expected, abs=1e-7)
    assert result.symplectic_residual < 1e-9
    T = result.transform
    assert np.max(np.abs(T.T @ A @ T - np.diag(np.concatenate([result.a, result.b])))) < 1e-8


def test_darboux_rejects_repeated_eigenvalues() -> None:
    with pytest.raises(NonGenericInputError):
        darboux_diagonalize(np.eye(4))
    with pytest.raises(InvalidInputError):
        darboux_diagonalize(np.eye(3))


def test_commuting_family() -> None:
    A = _symplectic_conjugate(np.diag([1.0, -2.0, 3.0, 5.0]))
    xi = np.array([0.5, -1.0, 2.0, 0.25])
    family = commuting_family(A, xi, 0.75)
    assert len(family) == 3
    assert family[0].max_abs_difference(QuadraticHamiltonian.constant(2, 1.0)) == 0.0
    for f in family:
        for g in family:
            assert poisson_bracket(f, g).max_abs_difference(QuadraticHamiltonian.zero(2)) < 1e-9
    total = sum(family[1:], QuadraticHamiltonian.constant(2, 0.75))
    assert total.max_abs_difference(QuadraticHamiltonian(A, xi, 0.75)) < 1e-9


def test_elliptic_curve_is_periodic() -> None:
    curve = homogeneous_curve(0, -1, 1)
    assert curve.kind is CurveKind.ELLIPSE
    assert curve.period == pytest.approx(2 * np.pi)
    for t in np.linspace(0.0, 3.0, 7):
        assert np.max(np.abs(curve.point(t + 2 * np.pi) - curve.point(t))) < 1e-9
    assert np.linalg.norm(curve.point(np.pi) - curve.point(0.0)) > 1.0
    assert homogeneous_curve(0, -4, 1).period == pytest.approx(np.pi)


def test_parabolic_curve_is_quadratic_in_time() -> None:
    curve = homogeneous_curve(1, 1, -1, x0=(1.0, 2.0))
    assert curve.kind is CurveKind.PARABOLA
    ts = np.linspace(-1.0, 1.0, 9)
    expected = np.column_stack([1.0 + ts + ts**2 / 2, 2.0 - ts**2 / 2])
    assert np.max(np.abs(curve.sample(ts) - expected)) < 1e-10


def test_line_and_hyperbola() -> None:
    line = homogeneous_curve(1, 2, 0)
    assert line.kind is CurveKind.LINE
    a, b, c = line.sample([0.0, 0.5, 1.3])
    u, v = b - a, c - a
    assert abs(u[0] * v[1] - u[1] * v[0]) < 1e-12
    assert homogeneous_curve(1, 0, 1).kind is CurveKind.HYPERBOLA
    assert homogeneous_curve(Fraction(1, 2), 1, 1).normalized_det == -1


def test_unused_variables_of_a_cylinder() -> None:
    W = np.asarray(unused_variables(polarize(parse_form("x**3/6 + x*y**2", dim=3))), dtype=float)
    assert W.shape == (3, 1)
    assert np.max(np.abs(W[:2, 0])) < 1e-12
    assert abs(W[2, 0]) > 0


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_lagrangian_grassmannian_dimension(n: int) -> None:
    linear, affine = lagrangian_grassmannian_dims(n, n)
    assert linear == n * (n + 1) // 2
    assert affine == linear + n
    assert lagrangian_grassmannian_dims(1, n)[0] == 2 * n - 1


def test_grassmannian_rejects_bad_ranks() -> None:
    with pytest.raises(InvalidInputError):
        lagrangian_grassmannian_dims(3, 2)


def test_affine_symplectic_group_operations() -> None:
    f = QuadraticHamiltonian.from_polynomial(QUADRATIC, 2)
    g = stabilizer_element([[2, 0], [1, 1]], [[0, 1], [1, 3]]) @ flow_element(f, 0.3)
    assert g.frame_residual() < 1e-9
    identity = (g @ g.inverse()).matrix()
    assert np.max(np.abs(identity - np.eye(5))) < 1e-9
    h = flow_element(f, -0.7)
    x = np.array([0.1, 0.2, -0.3, 0.4])
    assert np.max(np.abs((g @ h).apply(x) - g.apply(h.apply(x)))) < 1e-9
    assert AffineSymplecticElement.identity(2).apply(x) == pytest.approx(x)


def test_flows_form_a_one_parameter_group() -> None:
    f = QuadraticHamiltonian.from_polynomial(QUADRATIC, 2)
    composed = (flow_element(f, 0.4) @ flow_element(f, 0.5)).matrix()
    assert np.max(np.abs(composed - flow_element(f, 0.9).matrix())) < 1e-9


def test_non_symplectic_frame_is_rejected() -> None:
    with pytest.raises(InvalidInputError):
        AffineSymplecticElement([[2.0], [0.0]], [[0.0], [1.0]], [0.0, 0.0])
    with pytest.raises(InvalidInputError):
        stabilizer_element([[1, 0], [0, 1]], [[0, 1], [0, 0]])


def test_hamiltonian_record_round_trip() -> None:
    exact = QuadraticHamiltonian.from_polynomial(QUADRATIC, 2)
    assert QuadraticHamiltonian.from_record(exact.as_record()).max_abs_difference(exact) == 0.0
    noisy = random_hamiltonian(2, seed=9)
    assert QuadraticHamiltonian.from_record(noisy.as_record()).max_abs_difference(noisy) == 0.0
    with pytest.raises(InvalidInputError):
        QuadraticHamiltonian.from_record({"A": [[1]]})
