"""Real binary cubic forms: discriminant, normal forms and witnesses."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
from typing import Any, Optional

import numpy as np
import sympy as sp
from scipy.linalg import null_space

from ..lc_core.errors import InvalidInputError
from ..lc_core.forms import HomogeneousForm, LinearTransform, change_variables, parse_form

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-10
NEAR_DEGENERATE_TOL = 1e-6
WITNESS_TOL = 1e-9


class BinaryLabel(str, Enum):
    ZERO = "zero"
    PERFECT_CUBE = "perfect_cube"
    SQUARE_TIMES_LINEAR = "square_times_linear"
    LINEAR_TIMES_IRRED_QUADRATIC = "linear_times_irred_quadratic"
    THREE_DISTINCT_REAL_FACTORS = "three_distinct_real_factors"


NORMAL_FORMS: dict[BinaryLabel, str] = {
    BinaryLabel.ZERO: "0",
    BinaryLabel.PERFECT_CUBE: "x**3/6",
    BinaryLabel.SQUARE_TIMES_LINEAR: "x**2*y/2",
    BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC: "x**3/6 + y**3/6",
    BinaryLabel.THREE_DISTINCT_REAL_FACTORS: "x**2*y/2 - x*y**2/2",
}

ISOTROPY_DESCRIPTIONS: dict[BinaryLabel, str] = {
    BinaryLabel.ZERO: "GL(2,R)",
    BinaryLabel.PERFECT_CUBE: "[[1,0],[c,d]], d != 0",
    BinaryLabel.SQUARE_TIMES_LINEAR: "diag(a, 1/a^2), a != 0",
    BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC: "{I, swap}",
    BinaryLabel.THREE_DISTINCT_REAL_FACTORS: "Sigma_3",
}


def normal_form(label: BinaryLabel) -> HomogeneousForm:
    text = NORMAL_FORMS[BinaryLabel(label)]
    if text == "0":
        return HomogeneousForm.zero(2, 3)
    return parse_form(text, dim=2)


@dataclass(frozen=True)
class BinaryCubicClass:
    label: BinaryLabel
    discriminant: Any
    witness: Optional[LinearTransform] = None
    near_degenerate: bool = False
    witness_residual: Optional[float] = None

    @property
    def normal_form(self) -> HomogeneousForm:
        return normal_form(self.label)

    @property
    def witness_verified(self) -> bool:
        """Whether the witness maps the input onto the normal form within tolerance."""

        return self.witness_residual is not None and self.witness_residual <= WITNESS_TOL

    @property
    def is_stable(self) -> bool:
        return self.label in (
            BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC,
            BinaryLabel.THREE_DISTINCT_REAL_FACTORS,
        )


def _check_binary_cubic(F: HomogeneousForm) -> None:
    if F.dim != 2 or F.degree != 3:
        raise InvalidInputError(f"expected a binary cubic, got dim={F.dim}, degree={F.degree}")


def binary_coefficients(F: HomogeneousForm) -> tuple[Any, Any, Any, Any]:
    """``(a, b, c, d)`` with ``F = a x^3 + 3b x^2 y + 3c x y^2 + d y^3``."""

    _check_binary_cubic(F)
    three = Fraction(3) if F.is_exact else 3.0
    return (
        F.coefficient((3, 0)),
        F.coefficient((2, 1)) / three,
        F.coefficient((1, 2)) / three,
        F.coefficient((0, 3)),
    )


def binary_discriminant(F: HomogeneousForm) -> Any:
    """``a^2 d^2 - 3 b^2 c^2 + 4 b^3 d + 4 a c^3 - 6 abcd``; positive on one real root."""

    a, b, c, d = binary_coefficients(F)
    return a * a * d * d - 3 * b * b * c * c + 4 * b**3 * d + 4 * a * c**3 - 6 * a * b * c * d


def hessian_covariant(F: HomogeneousForm) -> tuple[Any, Any, Any]:
    """Coefficients of ``(ac - b^2) x^2 + (ad - bc) xy + (bd - c^2) y^2``."""

    a, b, c, d = binary_coefficients(F)
    return a * c - b * b, a * d - b * c, b * d - c * c


def _label_exact(F: HomogeneousForm) -> BinaryLabel:
    x, y = sp.symbols("x y")
    poly = sp.Poly(F.to_sympy((x, y)), x, y)
    _, factors = sp.sqf_list(poly)
    multiplicities = [mult for _, mult in factors]
    if 3 in multiplicities:
        return BinaryLabel.PERFECT_CUBE
    if 2 in multiplicities:
        return BinaryLabel.SQUARE_TIMES_LINEAR
    if binary_discriminant(F) > 0:
        return BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC
    return BinaryLabel.THREE_DISTINCT_REAL_FACTORS


def _label_float(F: HomogeneousForm, tol: float) -> tuple[BinaryLabel, bool]:
    scale = F.max_abs()
    delta = float(binary_discriminant(F))
    relative = abs(delta) / scale**4
    if relative > tol:
        label = (
            BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC if delta > 0 else BinaryLabel.THREE_DISTINCT_REAL_FACTORS
        )
        return label, relative < NEAR_DEGENERATE_TOL
    hess = max(abs(float(h)) for h in hessian_covariant(F)) / scale**2
    label = BinaryLabel.PERFECT_CUBE if hess <= np.sqrt(tol) else BinaryLabel.SQUARE_TIMES_LINEAR
    return label, True


def classify_binary(F: HomogeneousForm, tol: float = DEGENERATE_TOL, witness: bool = True) -> BinaryCubicClass:
    """Place ``F`` in one of the five real orbits.

    Rational input is classified exactly by square-free factorization; float
    input by the discriminant and the Hessian covariant with relative
    tolerance ``tol``.
    """

    _check_binary_cubic(F)
    delta = binary_discriminant(F)
    if F.is_zero(tol * max(1.0, F.max_abs())):
        return BinaryCubicClass(BinaryLabel.ZERO, delta, LinearTransform.identity(2), witness_residual=0.0)
    if F.is_exact:
        label, near = _label_exact(F), False
    else:
        label, near = _label_float(F, tol)
        if near:
            logger.warning("binary cubic is near the discriminant locus (delta=%.3e)", float(delta))
    if not witness:
        return BinaryCubicClass(label, delta, None, near)
    transform = binary_witness(F, label)
    return BinaryCubicClass(label, delta, transform, near, witness_residual(F, transform, label))


def projective_roots(F: HomogeneousForm) -> list[np.ndarray]:
    """Complex roots ``[x:y]`` of ``F`` as unit-normalized 2-vectors."""

    _check_binary_cubic(F)
    G = F.as_float()
    best_angle, best_value = 0.0, -1.0
    for angle in (0.0, 0.37, 0.91, 1.43, 2.11):
        direction = np.array([np.cos(angle), np.sin(angle)])
        value = abs(G(direction))
        if value > best_value * 1.5:
            best_angle, best_value = angle, value
    c, s = np.cos(best_angle), np.sin(best_angle)
    rotation = np.array([[c, -s], [s, c]])
    rotated = change_variables(G, LinearTransform(rotation))
    coeffs = [rotated.coefficient((3 - k, k)) for k in range(4)]
    # rotated(t, 1) = sum coeffs[k] t^(3-k)
    roots = np.roots(coeffs)
    out = []
    for t in roots:
        point = rotation @ np.array([t, 1.0], dtype=complex)
        out.append(point / np.linalg.norm(point))
    return out


def _realify(point: np.ndarray) -> np.ndarray:
    index = int(np.argmax(np.abs(point)))
    phase = point[index] / abs(point[index])
    return np.real(point / phase)


def _linear_from_coefficients(F: HomogeneousForm, T: np.ndarray, exp: tuple[int, int]) -> float:
    return float(change_variables(F.as_float(), LinearTransform(T)).coefficient(exp))


def binary_witness(F: HomogeneousForm, label: BinaryLabel) -> LinearTransform:
    """Float transform ``T`` with ``F o T`` equal to the table normal form of ``label``."""

    label = BinaryLabel(label)
    G = F.as_float()
    if label is BinaryLabel.ZERO:
        return LinearTransform.identity(2, exact=False)
    if label is BinaryLabel.PERFECT_CUBE:
        w = max((np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 1.0])), key=lambda v: abs(G(v)))
        grad = np.array([float(g(w)) for g in G.gradient()])
        root = np.array([-grad[1], grad[0]])
        scale = np.cbrt(1.0 / (6.0 * G(w)))
        T = np.column_stack([scale * w, root / np.linalg.norm(root)])
    elif label is BinaryLabel.SQUARE_TIMES_LINEAR:
        h = [float(v) for v in hessian_covariant(G)]
        quad = np.array([[h[0], h[1] / 2], [h[1] / 2, h[2]]])
        row = quad[int(np.argmax(np.abs(np.diag(quad))))]
        double = np.array([-row[1], row[0]])
        double /= np.linalg.norm(double)
        roots = [_realify(r) for r in projective_roots(G)]
        simple = max(roots, key=lambda r: abs(r[0] * double[1] - r[1] * double[0]))
        T = np.column_stack([simple, double])
        kappa = _linear_from_coefficients(G, T, (2, 1))
        T[:, 1] *= 1.0 / (2.0 * kappa)
    elif label is BinaryLabel.THREE_DISTINCT_REAL_FACTORS:
        r1, r2, r3 = (_realify(r) for r in projective_roots(G))
        a, b = np.linalg.solve(np.column_stack([r1, r2]), r3)
        T = np.column_stack([a * r1, b * r2])
        kappa = _linear_from_coefficients(G, T, (2, 1))
        T *= np.cbrt(1.0 / (2.0 * kappa))
    else:
        roots = projective_roots(G)
        real_index = int(np.argmin([np.linalg.norm(np.imag(r / r[np.argmax(np.abs(r))])) for r in roots]))
        real_root = _realify(roots[real_index])
        complex_root = next(r for i, r in enumerate(roots) if i != real_index)
        c = np.array([(1 + 1j * np.sqrt(3)) / 2, 1.0])
        # unknowns: T (row-major, 4), mu, Re lambda, Im lambda
        rows = []
        for i in range(2):
            rows.append([1.0 if k == 2 * i else 0.0 for k in range(4)] + [0.0] * 3)
            rows[-1][2 * i + 1] = -1.0
            rows[-1][4] = -real_root[i]
        for i in range(2):
            z = complex_root[i]
            re_row = [0.0] * 7
            im_row = [0.0] * 7
            re_row[2 * i], re_row[2 * i + 1] = c[0].real, c[1].real
            im_row[2 * i], im_row[2 * i + 1] = c[0].imag, c[1].imag
            # -(lambda z): real part -(lr zr - li zi), imaginary part -(lr zi + li zr)
            re_row[5], re_row[6] = -z.real, z.imag
            im_row[5], im_row[6] = -z.imag, -z.real
            rows.extend([re_row, im_row])
        kernel = null_space(np.array(rows))
        T = kernel[:4, 0].reshape(2, 2)
        kappa = _linear_from_coefficients(G, T, (3, 0))
        T *= np.cbrt(1.0 / (6.0 * kappa))
    return LinearTransform(T)


def witness_residual(F: HomogeneousForm, T: LinearTransform, label: BinaryLabel) -> float:
    """Relative size of ``F o T - N`` for the normal form ``N`` of ``label``."""

    image = change_variables(F.as_float(), T.as_float())
    error = (image - normal_form(label).as_float()).max_abs() / max(1.0, F.max_abs())
    if error > WITNESS_TOL:
        logger.warning("binary witness for %s has residual %.3e", label.value, error)
    return error


def isotropy_generators(label: BinaryLabel) -> list[LinearTransform]:
    """Sample elements of the isotropy group of the normal form of ``label``."""

    label = BinaryLabel(label)
    half = Fraction(1, 2)
    samples: dict[BinaryLabel, list[list[list[Any]]]] = {
        BinaryLabel.ZERO: [[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[2, 0], [0, 1]], [[1, 1], [0, 1]]],
        BinaryLabel.PERFECT_CUBE: [[[1, 0], [1, 2]], [[1, 0], [0, -1]], [[1, 0], [3, half]]],
        BinaryLabel.SQUARE_TIMES_LINEAR: [
            [[2, 0], [0, Fraction(1, 4)]],
            [[-1, 0], [0, 1]],
            [[Fraction(1, 3), 0], [0, 9]],
        ],
        BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC: [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],
        BinaryLabel.THREE_DISTINCT_REAL_FACTORS: [
            [[1, 0], [0, 1]],
            [[0, -1], [-1, 0]],
            [[1, 0], [1, -1]],
            [[-1, 1], [0, 1]],
            [[0, -1], [1, -1]],
            [[-1, 1], [-1, 0]],
        ],
    }
    return [LinearTransform.from_rows(rows) for rows in samples[label]]


def critical_directions(F: HomogeneousForm, tol: float = DEGENERATE_TOL) -> list[tuple[np.ndarray, bool]]:
    """Directions ``[x:y]`` where the gradient of ``F`` vanishes, with reality flags."""

    cls = classify_binary(F, tol=tol, witness=False)
    if cls.label is BinaryLabel.ZERO:
        raise InvalidInputError("every direction is critical for the zero form")
    if cls.label in (BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC, BinaryLabel.THREE_DISTINCT_REAL_FACTORS):
        return []
    G = F.as_float()
    if cls.label is BinaryLabel.PERFECT_CUBE:
        w = max((np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 1.0])), key=lambda v: abs(G(v)))
        grad = np.array([float(g(w)) for g in G.gradient()])
        root = np.array([-grad[1], grad[0]])
    else:
        h = [float(v) for v in hessian_covariant(G)]
        quad = np.array([[h[0], h[1] / 2], [h[1] / 2, h[2]]])
        row = quad[int(np.argmax(np.abs(np.diag(quad))))]
        root = np.array([-row[1], row[0]])
    root = root / np.linalg.norm(root)
    if root[int(np.argmax(np.abs(root)))] < 0:
        root = -root
    return [(root, True)]
