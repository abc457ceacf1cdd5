from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from lagrangian_cubics.classifiers import binary, ternary
from lagrangian_cubics.classifiers.ternary import TernaryLabel
from lagrangian_cubics.lc_core.errors import InvalidInputError
from lagrangian_cubics.lc_core.forms import HomogeneousForm, LinearTransform, SymTensor, act, parse_form, polarize
from lagrangian_cubics.lc_core.tableau import (
    AFFINE_PLANES,
    FROBENIUS,
    PROLONGATION_REQUIRED,
    TABULATED_GENERALITY,
    BilinearToVectorMap,
    ac_product,
    alpha_tableau,
    bc_injective,
    bc_product,
    cartan_test,
    coordinate_flag,
    generic_characters,
    integral_element_space,
    isotropy_algebra,
    kernel_dimension,
    prolong_to_involution,
    random_flags,
    same_generality,
)

FERMAT = polarize(ternary.hesse_form(Fraction(0)))
HESSE_ONE = polarize(ternary.hesse_form(Fraction(1)))


def _random_cubic(n: int, rng: np.random.Generator) -> SymTensor:
    coeffs = {}
    for exp in product(range(4), repeat=n):
        if sum(exp) == 3:
            coeffs[exp] = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
    return polarize(HomogeneousForm(n, 3, coeffs))


def _random_map(n: int, rng: np.random.Generator) -> BilinearToVectorMap:
    entries = np.empty((n, n, n), dtype=object)
    for index in np.ndindex(n, n, n):
        entries[index] = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 3)))
    return BilinearToVectorMap(n, entries)


def _six_term_oracle(A: BilinearToVectorMap, C: SymTensor) -> np.ndarray:
    n = C.dim
    eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def c(u, v, w):
        return sum(C[(i, j, k)] * u[i] * v[j] * w[k] for i in range(n) for j in range(n) for k in range(n))

    def a(u, v):
        return [sum(A.entries[i, j, k] * u[j] * v[k] for j in range(n) for k in range(n)) for i in range(n)]

    def three(u1, u2, u3, u4):
        return c(u1, u2, a(u3, u4)) + c(u1, a(u2, u4), u3) + c(a(u1, u4), u2, u3)

    out = np.empty((n, n, n, n), dtype=object)
    for i, j, k, l in np.ndindex(n, n, n, n):
        e1, e2, e3, e4 = eye[i], eye[j], eye[k], eye[l]
        out[i, j, k, l] = three(e1, e2, e3, e4) - three(e1, e2, e4, e3)
    return out


@pytest.mark.parametrize("n", [2, 3])
def test_ac_product_matches_the_six_term_expansion(n: int) -> None:
    rng = np.random.default_rng(n)
    for _ in range(5):
        A, C = _random_map(n, rng), _random_cubic(n, rng)
        assert np.all(ac_product(A, C) == _six_term_oracle(A, C))


def test_ac_product_symmetry() -> None:
    rng = np.random.default_rng(7)
    AC = ac_product(_random_map(3, rng), _random_cubic(3, rng))
    assert np.all(AC == AC.transpose(1, 0, 2, 3))
    assert np.all(AC == -AC.transpose(0, 1, 3, 2))


def test_bc_images_lie_in_the_kernel() -> None:
    rng = np.random.default_rng(2)
    for n in (2, 3):
        C = _random_cubic(n, rng)
        M = rng.integers(-3, 4, size=(n, n))
        B = (M + M.T).tolist()
        assert np.all(ac_product(bc_product(B, C), C) == 0)


def test_bc_product_needs_a_symmetric_matrix() -> None:
    with pytest.raises(InvalidInputError):
        bc_product([[1, 2], [0, 1]], polarize(parse_form("x**3 + y**3")))


def test_rank_one_map_through_an_unused_direction_is_integral() -> None:
    C = polarize(parse_form("x**3/6 + x*y**2", dim=3))
    rng = np.random.default_rng(4)
    for _ in range(5):
        L = rng.integers(-3, 4, size=(3, 3)).tolist()
        A = BilinearToVectorMap.rank_one([0, 0, 1], L)
        assert np.all(ac_product(A, C) == 0)


def test_kernel_dimensions() -> None:
    assert kernel_dimension(SymTensor.zeros(3, 3)) == 27
    assert kernel_dimension(polarize(parse_form("x**3/6", dim=3))) == 21
    assert kernel_dimension(FERMAT) == 12
    assert len(integral_element_space(FERMAT)) == 12


@pytest.mark.parametrize("label", [lab for lab in TernaryLabel if lab is not TernaryLabel.NONSINGULAR])
def test_singular_cubics_have_large_kernels(label: TernaryLabel) -> None:
    C = polarize(act(ternary.normal_form(label), LinearTransform.from_rows([[1, 1, 0], [0, 1, 2], [1, 0, 1]])))
    assert kernel_dimension(C) >= 9


def test_kernel_dimension_is_invariant_under_linear_changes() -> None:
    T = LinearTransform.from_rows([[2, 1, 0], [0, 1, -1], [1, 0, 1]])
    forms = [ternary.hesse_form(Fraction(0)), ternary.hesse_form(Fraction(1)), ternary.normal_form(TernaryLabel.CUSPIDAL)]
    for F in forms:
        assert kernel_dimension(polarize(act(F, T))) == kernel_dimension(polarize(F))


def test_isotropy_and_bc_injectivity() -> None:
    assert len(isotropy_algebra(SymTensor.zeros(3, 3))) == 9
    assert len(isotropy_algebra(FERMAT)) == 0
    assert bc_injective(FERMAT)
    assert not bc_injective(polarize(parse_form("x**3/6", dim=3)))


def test_cartan_test_on_hesse_sigma_one() -> None:
    report = cartan_test(HESSE_ONE, label="nonsingular")
    assert report.involutive
    assert report.generality == "3 functions of 2 variables"
    assert report.prolongation_dim == report.character_sum
    assert report.tabulated == "3 functions of 2 variables"


def test_cartan_test_on_fermat_is_involutive_at_a_generic_flag() -> None:
    report = cartan_test(FERMAT, label="nonsingular")
    assert report.characters == (6, 3, 0)
    assert report.prolongation_dim == 12
    assert report.involutive
    assert report.generality == "3 functions of 2 variables"
    assert report.agrees_with_tabulated


def test_fermat_at_the_coordinate_flag_looks_like_it_needs_a_prolongation() -> None:
    report = cartan_test(FERMAT, flags=[coordinate_flag(3)], max_prolongations=1)
    assert report.characters == (5, 3, 1)
    assert report.character_sum == 14
    assert not report.involutive
    assert PROLONGATION_REQUIRED in report.notes
    assert report.prolonged_characters is not None


def test_sigma_does_not_change_the_generic_characters() -> None:
    for sigma in (Fraction(0), Fraction(1), Fraction(2), Fraction(-3)):
        report = cartan_test(polarize(ternary.hesse_form(sigma)), seed=int(sigma) + 5)
        assert report.characters == (6, 3, 0)
        assert report.involutive


def test_generic_characters_prefer_the_flag_with_the_largest_ranks() -> None:
    tableau = alpha_tableau(FERMAT)
    flags = [coordinate_flag(3), coordinate_flag(3)] + random_flags(3, 5, seed=11)
    characters, votes = generic_characters(tableau, flags)
    assert characters == (6, 3, 0)
    assert 1 <= votes <= 5


AGREEING_ROWS = [
    TernaryLabel.PERFECT_CUBE,
    TernaryLabel.SQUARE_TIMES_INDEP_LINEAR,
    TernaryLabel.THREE_DISTINCT_DEPENDENT_FACTORS,
    TernaryLabel.LINEAR_TIMES_DEPENDENT_SEMIDEF_QUAD,
    TernaryLabel.NULL_LINEAR_TIMES_LORENTZ_QUAD,
    TernaryLabel.CUSPIDAL,
    TernaryLabel.IMAGINARY_NODAL,
    TernaryLabel.REAL_NODAL,
    TernaryLabel.NONSINGULAR,
]


@pytest.mark.parametrize("label", AGREEING_ROWS)
@pytest.mark.parametrize("seed", [0, 1])
def test_generic_flags_reproduce_the_tabulated_generality(label: TernaryLabel, seed: int) -> None:
    report = cartan_test(polarize(ternary.normal_form(label)), seed=seed, label=label.value)
    assert report.involutive
    assert report.generality == TABULATED_GENERALITY[(3, label.value)]
    assert report.agrees_with_tabulated


@pytest.mark.parametrize(
    "label", [TernaryLabel.THREE_INDEPENDENT_FACTORS, TernaryLabel.LINEAR_TIMES_INDEP_SEMIDEF_QUAD]
)
def test_three_independent_lines_give_a_system_of_finite_type(label: TernaryLabel) -> None:
    report = cartan_test(polarize(ternary.normal_form(label)), label=label.value)
    assert report.characters == (6, 1, 0)
    assert not report.involutive
    assert report.prolongation_dims == (7, 6, 3, 1, 0)
    assert report.prolongations == 4
    assert report.generality == FROBENIUS
    assert report.tabulated == "1 constant"
    assert report.agrees_with_tabulated


TRANSVERSAL_LINE_CONIC_ROWS = [
    TernaryLabel.DEF_LINEAR_TIMES_LORENTZ_QUAD,
    TernaryLabel.SPLIT_LINEAR_TIMES_LORENTZ_QUAD,
    TernaryLabel.LINEAR_TIMES_DEFINITE_QUAD,
]


def test_line_transversal_to_a_conic_is_involutive_after_two_prolongations() -> None:
    # the three rows are equivalent over the complex numbers, so every rank agrees
    reports = [
        cartan_test(polarize(ternary.normal_form(label)), label=label.value) for label in TRANSVERSAL_LINE_CONIC_ROWS
    ]
    for report in reports:
        assert report.characters == (6, 2, 0)
        assert report.prolongation_dims == (8, 9, 9, 9)
        assert report.prolongations == 2
        assert report.prolonged_characters == (9, 0, 0)
        assert report.generality == "9 functions of 1 variable"
    tabulated = {report.tabulated for report in reports}
    assert tabulated == {"8 functions of 1 variable", "2 functions of 2 variables"}
    assert not all(report.agrees_with_tabulated for report in reports)


def test_generality_comparison_reads_constants_as_finite_type() -> None:
    assert same_generality(FROBENIUS, "1 constant")
    assert same_generality(AFFINE_PLANES, "all Lagrangian planes")
    assert not same_generality("9 functions of 1 variable", "8 functions of 1 variable")


def test_prolongation_tower_stops_at_the_bound() -> None:
    C = polarize(ternary.normal_form(TernaryLabel.THREE_INDEPENDENT_FACTORS))
    tower = prolong_to_involution(alpha_tableau(C), random_flags(3, 3), 1)
    assert tower.level is None
    assert tower.dimensions == (7, 6, 3)


def test_cartan_test_on_the_zero_cubic() -> None:
    report = cartan_test(SymTensor.zeros(3, 3))
    assert report.generality == AFFINE_PLANES
    assert FROBENIUS in report.notes
    assert report.kernel_dim == 27


@pytest.mark.parametrize(
    "label", [binary.BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC, binary.BinaryLabel.THREE_DISTINCT_REAL_FACTORS]
)
def test_cartan_test_on_stable_binary_cubics(label: binary.BinaryLabel) -> None:
    report = cartan_test(polarize(binary.normal_form(label)))
    assert report.involutive
    assert report.generality == "1 function of 2 variables"


def test_characters_are_invariant_under_linear_changes() -> None:
    T = LinearTransform.from_rows([[1, 2, 0], [0, 1, 0], [1, 1, 1]])
    moved = polarize(act(ternary.hesse_form(Fraction(1)), T))
    assert cartan_test(moved).characters == cartan_test(HESSE_ONE).characters


def test_cartan_test_rejects_large_dimension() -> None:
    with pytest.raises(InvalidInputError):
        cartan_test(SymTensor.zeros(4, 3))
