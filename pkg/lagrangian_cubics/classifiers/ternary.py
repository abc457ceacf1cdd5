"""Real ternary cubic forms: the fifteen orbits, Hesse normalization and circuits."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from itertools import permutations
import logging
from math import factorial, prod
from typing import Any, Optional, Sequence

import numpy as np
import sympy as sp
from scipy.optimize import least_squares

from ..lc_core import linalg
from ..lc_core.errors import InvalidInputError, NonConvergenceError, NonGenericInputError
from ..lc_core.forms import (
    HomogeneousForm,
    LinearTransform,
    change_variables,
    default_symbols,
    monomials,
    parse_form,
    polarize,
    unused_directions,
)
from ..lc_core.utils import as_fraction
from . import binary, plane_curves
from .binary import BinaryLabel

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-10
NEAR_DEGENERATE_TOL = 1e-6
WITNESS_TOL = 1e-9
WITNESS_RESIDUAL_TOL = 1e-6
DIVISION_TOL = 1e-8
FACTOR_REJECT_TOL = 1e-4
CONIC_RANK_LOW = 1e-9
CONIC_RANK_HIGH = 1e-5
NULL_TOL_LOW = 1e-9
NULL_TOL_HIGH = 1e-5
REAL_LINE_TOL = 1e-6
REAL_FLEX_TOL = 1e-6
SIGMA_TOL = 1e-7
SIGMA_SINGULAR = Fraction(-1, 2)

# coordinate changes tried in turn when the numerics in the given chart do not settle
RETRY_TRANSFORMS = (
    ((1, 1, 0), (0, 1, 1), (1, 0, 2)),
    ((2, -1, 0), (1, 1, 1), (0, 1, -1)),
    ((1, 0, -1), (2, 1, 0), (1, 3, 1)),
)


class TernaryLabel(str, Enum):
    ZERO = "zero"
    PERFECT_CUBE = "perfect_cube"
    SQUARE_TIMES_INDEP_LINEAR = "square_times_indep_linear"
    THREE_DISTINCT_DEPENDENT_FACTORS = "three_distinct_dependent_factors"
    LINEAR_TIMES_DEPENDENT_SEMIDEF_QUAD = "linear_times_dependent_semidef_quad"
    THREE_INDEPENDENT_FACTORS = "three_independent_factors"
    LINEAR_TIMES_INDEP_SEMIDEF_QUAD = "linear_times_indep_semidef_quad"
    NULL_LINEAR_TIMES_LORENTZ_QUAD = "null_linear_times_lorentz_quad"
    DEF_LINEAR_TIMES_LORENTZ_QUAD = "def_linear_times_lorentz_quad"
    SPLIT_LINEAR_TIMES_LORENTZ_QUAD = "split_linear_times_lorentz_quad"
    LINEAR_TIMES_DEFINITE_QUAD = "linear_times_definite_quad"
    CUSPIDAL = "cuspidal"
    REAL_NODAL = "real_nodal"
    IMAGINARY_NODAL = "imaginary_nodal"
    NONSINGULAR = "nonsingular"


class Stability(str, Enum):
    STABLE = "stable"
    SEMISTABLE = "semistable"
    UNSTABLE = "unstable"


NORMAL_FORMS: dict[TernaryLabel, str] = {
    TernaryLabel.ZERO: "0",
    TernaryLabel.PERFECT_CUBE: "x**3/6",
    TernaryLabel.SQUARE_TIMES_INDEP_LINEAR: "x**2*y/2",
    TernaryLabel.THREE_DISTINCT_DEPENDENT_FACTORS: "x**2*y/2 - x*y**2/2",
    TernaryLabel.LINEAR_TIMES_DEPENDENT_SEMIDEF_QUAD: "x*(x**2 + y**2)/2",
    TernaryLabel.THREE_INDEPENDENT_FACTORS: "x*y*z",
    TernaryLabel.LINEAR_TIMES_INDEP_SEMIDEF_QUAD: "z*(x**2 + y**2)/2",
    TernaryLabel.NULL_LINEAR_TIMES_LORENTZ_QUAD: "x*(x*z - y**2)/2",
    TernaryLabel.DEF_LINEAR_TIMES_LORENTZ_QUAD: "z*(x**2 + y**2 - z**2)/2",
    TernaryLabel.SPLIT_LINEAR_TIMES_LORENTZ_QUAD: "x*(x**2 + y**2 - z**2)/2",
    TernaryLabel.LINEAR_TIMES_DEFINITE_QUAD: "x*(x**2 + y**2 + z**2)/2",
    TernaryLabel.CUSPIDAL: "x**3/6 - y**2*z/2",
    TernaryLabel.REAL_NODAL: "x**3/6 + x**2*z/2 - y**2*z/2",
    TernaryLabel.IMAGINARY_NODAL: "x**3/6 - x**2*z/2 - y**2*z/2",
    TernaryLabel.NONSINGULAR: "x**3/6 + y**3/6 + z**3/6 + sigma*x*y*z",
}

ISOTROPY_DESCRIPTIONS: dict[TernaryLabel, str] = {
    TernaryLabel.ZERO: "GL(3,R)",
    TernaryLabel.PERFECT_CUBE: "first row (1, 0, 0)",
    TernaryLabel.SQUARE_TIMES_INDEP_LINEAR: "[[a,0,0],[0,1/a^2,0],[*,*,*]]",
    TernaryLabel.THREE_DISTINCT_DEPENDENT_FACTORS: "Sigma_3 on (x, y), third row free",
    TernaryLabel.LINEAR_TIMES_DEPENDENT_SEMIDEF_QUAD: "[[1,0,0],[0,+-1,0],[*,*,*]]",
    TernaryLabel.THREE_INDEPENDENT_FACTORS: "permutations times diag(a, b, 1/(ab))",
    TernaryLabel.LINEAR_TIMES_INDEP_SEMIDEF_QUAD: "a O(2) + a^-2",
    TernaryLabel.NULL_LINEAR_TIMES_LORENTZ_QUAD: "[[a^2,0,0],[b,1/a,0],[b^2/a^2,2b/a^3,1/a^4]]",
    TernaryLabel.DEF_LINEAR_TIMES_LORENTZ_QUAD: "O(2) on (x, y)",
    TernaryLabel.SPLIT_LINEAR_TIMES_LORENTZ_QUAD: "1 + O(1,1) on (y, z)",
    TernaryLabel.LINEAR_TIMES_DEFINITE_QUAD: "1 + O(2) on (y, z)",
    TernaryLabel.CUSPIDAL: "diag(1, a, 1/a^2)",
    TernaryLabel.REAL_NODAL: "y -> +-y",
    TernaryLabel.IMAGINARY_NODAL: "y -> +-y",
    TernaryLabel.NONSINGULAR: "permutations of the variables",
}

_FROM_BINARY: dict[BinaryLabel, TernaryLabel] = {
    BinaryLabel.ZERO: TernaryLabel.ZERO,
    BinaryLabel.PERFECT_CUBE: TernaryLabel.PERFECT_CUBE,
    BinaryLabel.SQUARE_TIMES_LINEAR: TernaryLabel.SQUARE_TIMES_INDEP_LINEAR,
    BinaryLabel.THREE_DISTINCT_REAL_FACTORS: TernaryLabel.THREE_DISTINCT_DEPENDENT_FACTORS,
    BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC: TernaryLabel.LINEAR_TIMES_DEPENDENT_SEMIDEF_QUAD,
}


def hesse_form(sigma: Any) -> HomogeneousForm:
    """``x^3/6 + y^3/6 + z^3/6 + sigma xyz``."""

    exact = isinstance(sigma, (int, Fraction))
    sixth = Fraction(1, 6) if exact else 1.0 / 6.0
    coeffs = {(3, 0, 0): sixth, (0, 3, 0): sixth, (0, 0, 3): sixth, (1, 1, 1): sigma}
    return HomogeneousForm(3, 3, coeffs)


def normal_form(label: TernaryLabel, sigma: Any = Fraction(0)) -> HomogeneousForm:
    label = TernaryLabel(label)
    if label is TernaryLabel.ZERO:
        return HomogeneousForm.zero(3, 3)
    if label is TernaryLabel.NONSINGULAR:
        if sigma == SIGMA_SINGULAR:
            raise InvalidInputError("sigma = -1/2 gives a singular cubic")
        return hesse_form(sigma)
    return parse_form(NORMAL_FORMS[label], dim=3)


def stability(label: TernaryLabel) -> Stability:
    label = TernaryLabel(label)
    if label is TernaryLabel.NONSINGULAR:
        return Stability.STABLE
    if label in (TernaryLabel.REAL_NODAL, TernaryLabel.IMAGINARY_NODAL):
        return Stability.SEMISTABLE
    return Stability.UNSTABLE


@dataclass(frozen=True)
class HesseNormalization:
    sigma: float
    sigma_set: tuple[float, ...]
    transform: LinearTransform
    residual: float


@dataclass(frozen=True)
class TernaryCubicClass:
    label: TernaryLabel
    stability: Stability
    essential_variables: int
    sigma: Optional[float] = None
    sigma_set: tuple[float, ...] = ()
    circuits: Optional[int] = None
    witness: Optional[LinearTransform] = None
    singular_points: tuple[plane_curves.ProjectiveSingularPoint, ...] = ()
    factors: tuple[HomogeneousForm, ...] = ()
    near_degenerate: bool = False
    witness_residual: Optional[float] = None

    @property
    def normal_form(self) -> HomogeneousForm:
        if self.label is TernaryLabel.NONSINGULAR:
            return normal_form(self.label, self.sigma)
        return normal_form(self.label)

    @property
    def witness_verified(self) -> bool:
        """Whether the witness maps the input onto the normal form within tolerance."""

        return self.witness_residual is not None and self.witness_residual <= WITNESS_RESIDUAL_TOL


def _check_ternary_cubic(F: HomogeneousForm) -> None:
    if F.dim != 3 or F.degree != 3:
        raise InvalidInputError(f"expected a ternary cubic, got dim={F.dim}, degree={F.degree}")


def discriminant_degree(n: int) -> int:
    """Degree of the discriminant hypersurface of cubic forms in ``n`` variables."""

    if n < 1:
        raise InvalidInputError("n must be positive")
    return n * 2 ** (n - 1)


# -- reduction to fewer variables ------------------------------------------------


def _adapted_basis(F: HomogeneousForm) -> tuple[LinearTransform, int]:
    """Transform ``M`` whose last columns span the unused directions of ``F``."""

    kernel = unused_directions(F)
    ess = F.dim - kernel.shape[1]
    exact = linalg.is_exact_array(kernel)
    chosen: list[np.ndarray] = []
    eye = linalg.as_exact_array(np.eye(F.dim, dtype=int)) if exact else np.eye(F.dim)
    for i in range(F.dim):
        if len(chosen) == ess:
            break
        trial = np.column_stack(chosen + [eye[:, i]] + [kernel[:, j] for j in range(kernel.shape[1])])
        if linalg.rank(trial) == len(chosen) + 1 + kernel.shape[1]:
            chosen.append(eye[:, i])
    columns = chosen + [kernel[:, j] for j in range(kernel.shape[1])]
    return LinearTransform(np.column_stack(columns)), ess


def _binary_part(G: HomogeneousForm) -> HomogeneousForm:
    coeffs = {(e[0], e[1]): c for e, c in G.coeffs.items() if e[2] == 0}
    return HomogeneousForm(2, 3, coeffs, G.scalar_mode)


def _lift_binary(W: LinearTransform) -> LinearTransform:
    matrix = np.zeros((3, 3))
    matrix[:2, :2] = linalg.as_float_array(W.matrix)
    matrix[2, 2] = 1.0
    return LinearTransform(matrix)


def _classify_reduced(F: HomogeneousForm, tol: float, witness: bool) -> "TernaryCubicClass":
    M, ess = _adapted_basis(F)
    B = _binary_part(change_variables(F, M))
    bclass = binary.classify_binary(B, tol=tol, witness=witness)
    label = _FROM_BINARY[bclass.label]
    transform = None
    if witness and bclass.witness is not None and label is not TernaryLabel.ZERO:
        target = _binary_part(normal_form(label))
        W0 = binary.binary_witness(target, bclass.label)
        W = LinearTransform(linalg.as_float_array(bclass.witness.matrix) @ np.linalg.inv(linalg.as_float_array(W0.matrix)))
        transform = M.as_float() @ _lift_binary(W)
    return TernaryCubicClass(
        label=label,
        stability=stability(label),
        essential_variables=ess,
        witness=transform,
        near_degenerate=bclass.near_degenerate,
    )


# -- linear factors ----------------------------------------------------------------


def _line_form(coefficients: Sequence[Any]) -> HomogeneousForm:
    coeffs = {}
    for i, c in enumerate(coefficients):
        exp = [0, 0, 0]
        exp[i] = 1
        coeffs[tuple(exp)] = c
    return HomogeneousForm(3, 1, coeffs)


def _quadric_matrix(Q: HomogeneousForm) -> np.ndarray:
    """Symmetric ``A`` with ``Q(x) = x^T A x``."""

    exact = Q.is_exact
    A = linalg.zeros_like_mode((3, 3), exact)
    half = Fraction(1, 2) if exact else 0.5
    for exp, c in Q.coeffs.items():
        idx = [i for i, e in enumerate(exp) for _ in range(e)]
        if idx[0] == idx[1]:
            A[idx[0], idx[0]] = c
        else:
            A[idx[0], idx[1]] = c * half
            A[idx[1], idx[0]] = c * half
    return A


def divide_by_line(F: HomogeneousForm, line: Sequence[float]) -> tuple[HomogeneousForm, float]:
    """Least-squares quotient ``Q`` with ``F ~ L Q`` and the relative residual."""

    L = _line_form([float(v) for v in line])
    quad_basis = monomials(3, F.degree - 1)
    cubic_basis = monomials(3, F.degree)
    columns = []
    for exp in quad_basis:
        product = L * HomogeneousForm(3, F.degree - 1, {exp: 1.0})
        columns.append([float(product.coefficient(e)) for e in cubic_basis])
    A = np.array(columns).T
    b = np.array([float(F.coefficient(e)) for e in cubic_basis])
    solution, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.max(np.abs(A @ solution - b))) / max(F.max_abs(), 1e-300)
    Q = HomogeneousForm(3, F.degree - 1, dict(zip(quad_basis, solution.tolist())))
    return Q, residual


_CUBICS = monomials(3, 3)
_QUADRICS = monomials(3, 2)
_PRODUCT = np.zeros((len(_CUBICS), 3, len(_QUADRICS)))
for _i in range(3):
    for _j, _exp in enumerate(_QUADRICS):
        _raised = list(_exp)
        _raised[_i] += 1
        _PRODUCT[_CUBICS.index(tuple(_raised)), _i, _j] = 1.0


def refine_line_factor(F: HomogeneousForm, line: Sequence[float]) -> tuple[HomogeneousForm, HomogeneousForm, float]:
    """Nonlinear least-squares ``F ~ L Q`` started from ``line``, with the relative residual.

    Both the line and the conic move, so a starting line that is only
    approximately a factor (as near a multiple singular point) still converges.
    """

    G = F.as_float()
    scale = max(G.max_abs(), 1e-300)
    target = np.array([float(G.coefficient(e)) for e in _CUBICS]) / scale
    l0 = np.asarray(line, dtype=float)
    l0 = l0 / np.linalg.norm(l0)
    Q0, _ = divide_by_line(G.scale(1.0 / scale), l0)
    q0 = np.array([float(Q0.coefficient(e)) for e in _QUADRICS])

    def residuals(params: np.ndarray) -> np.ndarray:
        l, q = params[:3], params[3:]
        product = np.einsum("kij,i,j->k", _PRODUCT, l, q)
        return np.concatenate([product - target, [l @ l - 1.0]])

    fit = least_squares(residuals, np.concatenate([l0, q0]), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    l, q = fit.x[:3], fit.x[3:]
    residual = float(np.max(np.abs(residuals(fit.x)[:-1])))
    Q = HomogeneousForm(3, 2, dict(zip(_QUADRICS, (q * scale).tolist())), "float64")
    return _line_form(l.tolist()), Q, residual


def _rational_factors(F: HomogeneousForm) -> list[HomogeneousForm]:
    """Factorization over the rationals, repeated factors listed repeatedly."""

    symbols = default_symbols(3)
    content, factors = sp.factor_list(F.to_sympy(symbols), *symbols)
    out: list[HomogeneousForm] = []
    for factor, multiplicity in factors:
        form = HomogeneousForm.from_sympy(factor, symbols)
        out.extend([form] * multiplicity)
    if out:
        out[0] = out[0].scale(as_fraction(content))
    return out


def _real_line(point_a: np.ndarray, point_b: np.ndarray, tol: float = REAL_LINE_TOL) -> Optional[np.ndarray]:
    line = plane_curves.line_through(point_a, point_b)
    if not plane_curves.is_real_point(line, tol):
        return None
    return plane_curves.real_part(line)


def _tangent_cone_line(F: HomogeneousForm, point: np.ndarray) -> np.ndarray:
    H = np.real(plane_curves.hessian_matrix(F, plane_curves.real_part(point)))
    values, vectors = np.linalg.eigh(H)
    return vectors[:, int(np.argmax(np.abs(values)))]


def _candidate_lines(F: HomogeneousForm) -> list[np.ndarray]:
    M, ess = _adapted_basis(F)
    if ess <= 2:
        B = _binary_part(change_variables(F, M)).as_float()
        Minv = np.linalg.inv(linalg.as_float_array(M.matrix))
        lines = []
        for root in binary.projective_roots(B):
            if plane_curves.is_real_point(root):
                r = plane_curves.real_part(root)
                lines.append(np.array([r[1], -r[0], 0.0]) @ Minv)
        return lines
    points, _ = plane_curves.singular_points(F)
    lines = []
    for i, p in enumerate(points):
        for q in points[i + 1 :]:
            line = _real_line(p.coords, q.coords)
            if line is not None:
                lines.append(line)
        if p.is_real and p.local_type == plane_curves.CUSP:
            lines.append(_tangent_cone_line(F, p.coords))
    return lines


def linear_factor(F: HomogeneousForm) -> Optional[tuple[HomogeneousForm, HomogeneousForm]]:
    """A real linear factor ``L`` of ``F`` and the quotient ``Q = F / L``, if any.

    Rational input is factored exactly when a rational linear factor exists.
    Otherwise candidate lines through pairs of singular points (or along a
    cusp's tangent cone) are refined by least squares and accepted with a
    relative residual below 1e-8.
    """

    _check_ternary_cubic(F)
    if F.is_zero():
        raise InvalidInputError("the zero form has every linear factor")
    if F.is_exact:
        factors = _rational_factors(F)
        for i, factor in enumerate(factors):
            if factor.degree == 1:
                rest = [f for j, f in enumerate(factors) if j != i]
                Q = rest[0]
                for f in rest[1:]:
                    Q = Q * f
                return factor, Q
    for line in _candidate_lines(F):
        L, Q, residual = refine_line_factor(F, line)
        if residual < DIVISION_TOL:
            return L, Q
    return None


# -- line times conic ------------------------------------------------------------------


def _banded(value: float, low: float, high: float) -> tuple[bool, bool]:
    """Whether ``value`` counts as small, and whether it fell inside ``[low, high]``."""

    return value < float(np.sqrt(low * high)), low <= value <= high


def _restricted_det(L: HomogeneousForm, A: np.ndarray) -> Any:
    row = linalg.coerce_array([[L.coefficient(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]])
    if not L.is_exact:
        row = linalg.as_float_array(row)
        row = row / np.linalg.norm(row)
        A = linalg.as_float_array(A)
    basis = linalg.nullspace(row)
    return linalg.det(basis.T.dot(A).dot(basis))


def _line_times_conic_label(L: HomogeneousForm, Q: HomogeneousForm) -> tuple[TernaryLabel, bool]:
    """Orbit of ``L Q`` for a line independent of the conic's vertex, and a near-degenerate flag.

    Float input is normalized (unit line, unit spectral norm for the conic)
    before the rank and tangency tests, which are banded.
    """

    if L.is_exact and Q.is_exact:
        A = _quadric_matrix(Q)
        pos, neg, zero = linalg.inertia(A)
        if zero == 0:
            if pos == 3 or neg == 3:
                return TernaryLabel.LINEAR_TIMES_DEFINITE_QUAD, False
            det = _restricted_det(L, A)
            if det == 0:
                return TernaryLabel.NULL_LINEAR_TIMES_LORENTZ_QUAD, False
            label = TernaryLabel.DEF_LINEAR_TIMES_LORENTZ_QUAD if det > 0 else TernaryLabel.SPLIT_LINEAR_TIMES_LORENTZ_QUAD
            return label, False
        if zero == 1:
            definite = pos == 2 or neg == 2
            return (TernaryLabel.LINEAR_TIMES_INDEP_SEMIDEF_QUAD if definite else TernaryLabel.THREE_INDEPENDENT_FACTORS), False
        raise NonConvergenceError("conic factor has rank below two for a cubic in three essential variables")
    A = linalg.as_float_array(_quadric_matrix(Q.as_float()))
    eigenvalues = np.linalg.eigvalsh(A)
    A = A / max(float(np.max(np.abs(eigenvalues))), 1e-300)
    eigenvalues = np.linalg.eigvalsh(A)
    order = np.argsort(np.abs(eigenvalues))
    singular, near = _banded(abs(float(eigenvalues[order[0]])), CONIC_RANK_LOW, CONIC_RANK_HIGH)
    if abs(float(eigenvalues[order[1]])) < CONIC_RANK_HIGH:
        raise NonConvergenceError("conic factor has rank below two for a cubic in three essential variables")
    if singular:
        rest = eigenvalues[order[1:]]
        definite = bool(np.all(rest > 0) or np.all(rest < 0))
        label = TernaryLabel.LINEAR_TIMES_INDEP_SEMIDEF_QUAD if definite else TernaryLabel.THREE_INDEPENDENT_FACTORS
        return label, near
    if np.all(eigenvalues > 0) or np.all(eigenvalues < 0):
        return TernaryLabel.LINEAR_TIMES_DEFINITE_QUAD, near
    det = float(_restricted_det(L.as_float(), A))
    tangent, near_tangent = _banded(abs(det), NULL_TOL_LOW, NULL_TOL_HIGH)
    near = near or near_tangent
    if tangent:
        return TernaryLabel.NULL_LINEAR_TIMES_LORENTZ_QUAD, near
    label = TernaryLabel.DEF_LINEAR_TIMES_LORENTZ_QUAD if det > 0 else TernaryLabel.SPLIT_LINEAR_TIMES_LORENTZ_QUAD
    return label, near


def _triangle_witness(F: HomogeneousForm, lines: Sequence[np.ndarray]) -> Optional[LinearTransform]:
    M = np.array([np.asarray(line, dtype=float) for line in lines])
    if abs(np.linalg.det(M)) < 1e-12:
        return None
    Minv = np.linalg.inv(M)
    G = change_variables(F.as_float(), LinearTransform(Minv))
    c = float(G.coefficient((1, 1, 1)))
    return LinearTransform(Minv @ np.diag([1.0 / c, 1.0, 1.0]))


def _lines_of(factors: Sequence[HomogeneousForm]) -> list[np.ndarray]:
    return [
        np.array([float(f.coefficient(e)) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))])
        for f in factors
        if f.degree == 1
    ]


def _classify_reducible_exact(F: HomogeneousForm, factors: list[HomogeneousForm], witness: bool) -> TernaryCubicClass:
    if all(f.degree == 1 for f in factors):
        label = TernaryLabel.THREE_INDEPENDENT_FACTORS
    else:
        L = next(f for f in factors if f.degree == 1)
        Q = next(f for f in factors if f.degree == 2)
        label, _ = _line_times_conic_label(L, Q)
    transform = None
    if witness and label is TernaryLabel.THREE_INDEPENDENT_FACTORS:
        lines = _lines_of(factors)
        if len(lines) < 3:
            lines += _conic_lines(next(f for f in factors if f.degree == 2))
        transform = _triangle_witness(F, lines)
    return TernaryCubicClass(
        label=label,
        stability=stability(label),
        essential_variables=3,
        witness=transform,
        factors=tuple(factors),
    )


def _conic_lines(Q: HomogeneousForm) -> list[np.ndarray]:
    """Real line pair of a rank-two indefinite conic."""

    A = linalg.as_float_array(_quadric_matrix(Q.as_float()))
    values, vectors = np.linalg.eigh(A)
    order = np.argsort(values)
    lo, hi = order[0], order[2]
    u = np.sqrt(values[hi]) * vectors[:, hi]
    v = np.sqrt(-values[lo]) * vectors[:, lo]
    return [u + v, u - v]


# -- singular-point analysis -----------------------------------------------------------


def _factor_through(F: HomogeneousForm, line: np.ndarray) -> tuple[HomogeneousForm, HomogeneousForm, bool]:
    """Line factor through ``line`` and its near-degenerate flag; raises when there is none."""

    L, Q, residual = refine_line_factor(F, line)
    if residual >= FACTOR_REJECT_TOL:
        raise NonConvergenceError(f"line through the singular points does not divide the cubic ({residual:.3e})")
    return L, Q, residual >= DIVISION_TOL


def _classify_by_singular_points(F: HomogeneousForm, witness: bool) -> TernaryCubicClass:
    locus = plane_curves.singular_locus(F)
    if locus.non_isolated:
        raise NonConvergenceError("non-isolated singular locus for a cubic in three essential variables")
    points = tuple(locus.points)
    near = locus.near_degenerate
    count = len(points)
    factors: tuple[HomogeneousForm, ...] = ()
    transform = None
    if count == 0:
        return _classify_nonsingular(F, witness, near)
    if count == 1:
        point = points[0]
        if not plane_curves.is_real_point(point.coords, REAL_LINE_TOL):
            raise NonConvergenceError("a lone singular point must be real")
        if point.local_type == plane_curves.NODE_REAL:
            label = TernaryLabel.REAL_NODAL
        elif point.local_type == plane_curves.NODE_IMAGINARY:
            label = TernaryLabel.IMAGINARY_NODAL
        elif point.local_type == plane_curves.CUSP:
            L, Q, residual = refine_line_factor(F, _tangent_cone_line(F, point.coords))
            divides, near_division = _banded(residual, DIVISION_TOL, FACTOR_REJECT_TOL)
            near = near or near_division
            if divides:
                label = TernaryLabel.NULL_LINEAR_TIMES_LORENTZ_QUAD
                factors = (L, Q)
            else:
                label = TernaryLabel.CUSPIDAL
        else:
            raise NonConvergenceError(f"unexpected singular point of type {point.local_type}")
    elif count == 2:
        line = _real_line(points[0].coords, points[1].coords)
        if line is None:
            raise NonConvergenceError("two singular points not on a real line")
        L, Q, near_division = _factor_through(F, line)
        label, near_label = _line_times_conic_label(L, Q)
        near = near or near_division or near_label
        factors = (L, Q)
    elif count == 3:
        if all(p.is_real for p in points):
            label = TernaryLabel.THREE_INDEPENDENT_FACTORS
            lines = [_real_line(points[i].coords, points[j].coords) for i, j in ((1, 2), (0, 2), (0, 1))]
            if any(line is None for line in lines):
                raise NonConvergenceError("real singular points span a non-real line")
            factors = tuple(_line_form(line.tolist()) for line in lines)
            if witness:
                transform = _triangle_witness(F, lines)
        else:
            label = TernaryLabel.LINEAR_TIMES_INDEP_SEMIDEF_QUAD
            complex_points = [p for p in points if not p.is_real]
            if len(complex_points) != 2:
                raise NonConvergenceError("three singular points with one non-real point")
            line = _real_line(complex_points[0].coords, complex_points[1].coords)
            if line is not None:
                L, Q, near_division = _factor_through(F, line)
                near = near or near_division
                factors = (L, Q)
    else:
        raise NonConvergenceError(f"found {count} singular points on a cubic")
    return TernaryCubicClass(
        label=label,
        stability=stability(label),
        essential_variables=3,
        witness=transform,
        singular_points=points,
        factors=factors,
        near_degenerate=near,
    )


def _classify_nonsingular(F: HomogeneousForm, witness: bool, near: bool = False) -> TernaryCubicClass:
    flex_points = plane_curves.flexes(F)
    normalization = hesse_normalize(F, flex_points)
    count = circuits(F, flex_points)
    expected = 2 if normalization.sigma < -0.5 else 1
    if count != expected:
        logger.warning("circuit count %d disagrees with sigma=%.6f", count, normalization.sigma)
        near = True
    near = near or abs(normalization.sigma + 0.5) < NEAR_DEGENERATE_TOL
    return TernaryCubicClass(
        label=TernaryLabel.NONSINGULAR,
        stability=Stability.STABLE,
        essential_variables=3,
        sigma=normalization.sigma,
        sigma_set=normalization.sigma_set,
        circuits=count,
        witness=normalization.transform if witness else None,
        near_degenerate=near,
    )


def _moved(F: HomogeneousForm, rows: Sequence[Sequence[int]]) -> tuple[HomogeneousForm, LinearTransform]:
    R = LinearTransform.from_rows(rows)
    return change_variables(F, R if F.is_exact else R.as_float()), R


def _pull_back(result: TernaryCubicClass, R: LinearTransform) -> TernaryCubicClass:
    """A classification of ``F o R`` restated in the coordinates of ``F``."""

    matrix = linalg.as_float_array(R.matrix)
    inverse = R.inverse()
    points = tuple(
        replace(p, coords=plane_curves.normalize_point(matrix @ p.coords)) for p in result.singular_points
    )
    factors = tuple(change_variables(f, inverse if f.is_exact else inverse.as_float()) for f in result.factors)
    witness = None if result.witness is None else R.as_float() @ result.witness
    return replace(result, singular_points=points, factors=factors, witness=witness)


def _classify_with_retries(F: HomogeneousForm, witness: bool) -> TernaryCubicClass:
    try:
        return _classify_by_singular_points(F, witness)
    except NonConvergenceError as exc:
        error = exc
    for rows in RETRY_TRANSFORMS:
        logger.info("retrying ternary classification in new coordinates: %s", error)
        G, R = _moved(F, rows)
        try:
            return _pull_back(_classify_by_singular_points(G, witness), R)
        except NonConvergenceError as exc:
            error = exc
    raise error


def classify_ternary(F: HomogeneousForm, tol: float = DEGENERATE_TOL, witness: bool = True) -> TernaryCubicClass:
    """Place ``F`` in one of the fifteen real orbits of ternary cubics.

    Forms in at most two essential variables reduce to the binary classifier.
    Rational input with a rational factorization is decided exactly from the
    factors; every other input is decided by its singular points, retried in
    fresh coordinates when the numerics do not settle.
    """

    _check_ternary_cubic(F)
    if F.is_zero(tol * max(1.0, F.max_abs())):
        return TernaryCubicClass(
            TernaryLabel.ZERO,
            Stability.UNSTABLE,
            0,
            witness=LinearTransform.identity(3) if witness else None,
            witness_residual=0.0 if witness else None,
        )
    _, ess = _adapted_basis(F)
    factors = _rational_factors(F) if F.is_exact and ess == 3 else []
    if ess <= 2:
        result = _classify_reduced(F, tol, witness)
    elif len(factors) > 1:
        result = _classify_reducible_exact(F, factors, witness)
    else:
        result = _classify_with_retries(F, witness)
    if result.witness is not None:
        result = replace(result, witness_residual=witness_residual(F, result.witness, result.normal_form))
    if result.near_degenerate:
        logger.warning("ternary cubic %s is near a degenerate stratum", result.label.value)
    return result


# -- Hesse normal form ----------------------------------------------------------------


def _coefficients_after(tensor: np.ndarray, T: np.ndarray) -> np.ndarray:
    entries = tensor
    for _ in range(3):
        entries = np.tensordot(entries, T, axes=([0], [0]))
    return np.array([entries[_index(exp)] / prod(factorial(e) for e in exp) for exp in monomials(3, 3)])


def _index(exp: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(i for i, e in enumerate(exp) for _ in range(e))


def _hesse_coefficients(sigma: float) -> np.ndarray:
    return np.array([float(hesse_form(float(sigma)).coefficient(exp)) for exp in monomials(3, 3)])


def _split_flexes(flex_points: Sequence[np.ndarray]) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """The three real and six imaginary flexes; the three most nearly real are the real ones."""

    if len(flex_points) != 9:
        raise NonConvergenceError(f"expected 9 flexes, got {len(flex_points)}")
    ordered = sorted(flex_points, key=plane_curves.imaginary_size)
    if plane_curves.imaginary_size(ordered[2]) > REAL_FLEX_TOL or plane_curves.imaginary_size(ordered[3]) < REAL_FLEX_TOL:
        raise NonConvergenceError("cannot separate 3 real flexes from 6 imaginary ones")
    return [plane_curves.real_part(p) for p in ordered[:3]], [plane_curves.normalize_point(p) for p in ordered[3:]]


def _triangle_sides(real: Sequence[np.ndarray], imaginary: Sequence[np.ndarray]) -> list[np.ndarray]:
    """The side through each real flex that carries a conjugate pair of imaginary flexes."""

    sides = []
    for p in real:
        unit_p = p / np.linalg.norm(p)

        def collinearity(q: np.ndarray) -> float:
            unit_q = q / np.linalg.norm(q)
            return abs(np.linalg.det(np.array([unit_p, unit_q, np.conj(unit_q)])))

        q = min(imaginary, key=collinearity)
        sides.append(plane_curves.real_part(plane_curves.line_through(p, q)))
    return sides


def _fit_hesse(F: HomogeneousForm, sides: Sequence[np.ndarray]) -> HesseNormalization:
    M = np.array(sides)
    if abs(np.linalg.det(M)) < 1e-12:
        raise NonConvergenceError("flex triangle is degenerate")
    Minv = np.linalg.inv(M)
    G = change_variables(F.as_float(), LinearTransform(Minv))
    cubes = np.array([float(G.coefficient(e)) for e in ((3, 0, 0), (0, 3, 0), (0, 0, 3))])
    mixed = float(G.coefficient((1, 1, 1)))
    if np.any(np.abs(cubes) < 1e-12 * G.max_abs()):
        raise NonConvergenceError("flex triangle does not diagonalize the cubic")
    scales = np.cbrt(1.0 / (6.0 * cubes))
    T0 = Minv @ np.diag(scales)
    sigma0 = mixed * float(np.prod(scales))

    tensor = linalg.as_float_array(polarize(F.as_float()).entries)

    def residuals(params: np.ndarray) -> np.ndarray:
        T = params[:9].reshape(3, 3)
        return _coefficients_after(tensor, T) - _hesse_coefficients(params[9])

    fit = least_squares(residuals, np.concatenate([T0.ravel(), [sigma0]]), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    T = fit.x[:9].reshape(3, 3)
    sigma = float(fit.x[9])
    residual = float(np.max(np.abs(residuals(fit.x)))) / max(F.max_abs(), 1e-300)
    if residual > WITNESS_RESIDUAL_TOL:
        raise NonConvergenceError(f"Hesse normalization residual {residual:.3e}")
    best = min(permutations(range(3)), key=lambda perm: float(np.linalg.norm(T[:, list(perm)] - np.eye(3))))
    return HesseNormalization(sigma, (sigma,), LinearTransform(T[:, list(best)]), residual)


def _normalize_from_flexes(F: HomogeneousForm, flex_points: Sequence[np.ndarray]) -> HesseNormalization:
    real, imaginary = _split_flexes(flex_points)
    fits: list[HesseNormalization] = []
    for anchor in range(3):
        ordered = real[anchor:] + real[:anchor]
        try:
            fits.append(_fit_hesse(F, _triangle_sides(ordered, imaginary)))
        except NonConvergenceError as exc:
            logger.debug("Hesse fit from real flex %d failed: %s", anchor, exc)
    if not fits:
        raise NonConvergenceError("no real flex gives a Hesse normalization")
    estimates: list[float] = []
    for fit in sorted(fits, key=lambda f: f.sigma):
        if not estimates or fit.sigma - estimates[-1] > SIGMA_TOL:
            estimates.append(fit.sigma)
    best = min(fits, key=lambda f: (round(f.sigma / SIGMA_TOL), f.residual))
    if len(estimates) > 1:
        logger.warning("real flexes give different Hesse parameters %s", estimates)
    return HesseNormalization(min(estimates), tuple(estimates), best.transform, best.residual)


def hesse_normalize(F: HomogeneousForm, flex_points: Optional[Sequence[np.ndarray]] = None) -> HesseNormalization:
    """Transform ``T`` and ``sigma`` with ``F o T = x^3/6 + y^3/6 + z^3/6 + sigma xyz``.

    Each real flex lies on one side of the unique real triangle of the Hesse
    configuration.  Starting from every real flex in turn, ``F`` is written in
    those sides, rescaled and polished by nonlinear least squares; the
    canonical ``sigma`` is the least of the estimates, all of which are kept in
    ``sigma_set``.  When the flexes cannot be resolved the computation is
    repeated in fresh coordinates.
    """

    _check_ternary_cubic(F)
    try:
        points = plane_curves.flexes(F) if flex_points is None else list(flex_points)
        return _normalize_from_flexes(F, points)
    except NonConvergenceError as exc:
        error = exc
    for rows in RETRY_TRANSFORMS:
        logger.info("retrying Hesse normalization in new coordinates: %s", error)
        G, R = _moved(F, rows)
        try:
            normalization = _normalize_from_flexes(G, plane_curves.flexes(G))
        except NonConvergenceError as exc:
            error = exc
            continue
        return replace(normalization, transform=R.as_float() @ normalization.transform)
    raise error


# -- circuits ---------------------------------------------------------------------------


def _weierstrass_discriminant(F: HomogeneousForm, flex: np.ndarray) -> float:
    G0 = F.as_float()
    grad = np.array([float(g(flex)) for g in G0.gradient()])
    on_tangent = linalg.nullspace(np.vstack([grad, flex]))[:, 0]
    off_tangent = grad / np.linalg.norm(grad)
    A = np.column_stack([on_tangent, flex, off_tangent])
    G = change_variables(G0, LinearTransform(A))

    def c(*exp: int) -> float:
        return float(G.coefficient(exp))

    alpha, beta, gamma, delta = c(3, 0, 0), c(0, 2, 1), c(1, 1, 1), c(0, 1, 2)
    epsilon, zeta, eta = c(2, 0, 1), c(1, 0, 2), c(0, 0, 3)
    D = HomogeneousForm(
        2,
        3,
        {
            (3, 0): -4 * beta * alpha,
            (2, 1): gamma**2 - 4 * beta * epsilon,
            (1, 2): 2 * gamma * delta - 4 * beta * zeta,
            (0, 3): delta**2 - 4 * beta * eta,
        },
        "float64",
    )
    return float(binary.binary_discriminant(D)) / max(D.max_abs(), 1e-300) ** 4


def circuits(F: HomogeneousForm, flex_points: Optional[Sequence[np.ndarray]] = None) -> int:
    """Number of connected components of the real locus of a nonsingular cubic.

    A real flex is moved to ``[0:1:0]`` with tangent ``Z = 0``; the curve is
    then ``beta Y^2 + (gamma X + delta) Y + ... = 0`` and it has two circuits
    exactly when the discriminant in ``Y`` has three real roots.
    """

    _check_ternary_cubic(F)
    points = plane_curves.flexes(F) if flex_points is None else list(flex_points)
    ordered = sorted(points, key=plane_curves.imaginary_size)
    if not ordered or plane_curves.imaginary_size(ordered[0]) > REAL_FLEX_TOL:
        raise NonConvergenceError("no real flex found")
    flex = plane_curves.real_part(ordered[0])
    return 2 if _weierstrass_discriminant(F, flex / np.linalg.norm(flex)) < 0 else 1


# -- predicates -------------------------------------------------------------------------


def is_singular(F: HomogeneousForm, tol: float = DEGENERATE_TOL) -> bool:
    """Whether the projective hypersurface ``F = 0`` is singular, for ``n`` in {2, 3}."""

    if F.degree != 3:
        raise InvalidInputError("is_singular expects a cubic")
    if F.dim == 2:
        return not binary.classify_binary(F, tol=tol, witness=False).is_stable
    if F.dim != 3:
        raise NonGenericInputError(f"singularity test is implemented for n in (2, 3), got {F.dim}")
    if F.is_zero(tol * max(1.0, F.max_abs())):
        return True
    _, ess = _adapted_basis(F)
    if ess < 3:
        return True
    points, non_isolated = plane_curves.singular_points(F)
    return bool(points) or non_isolated


def critical_lines(F: HomogeneousForm) -> list[tuple[np.ndarray, bool]]:
    """Lines of ``V`` on which ``F`` has a critical point, with reality flags."""

    if F.degree != 3:
        raise InvalidInputError("critical_lines expects a cubic")
    if F.dim == 2:
        return binary.critical_directions(F)
    if F.dim != 3:
        raise NonGenericInputError(f"critical lines are implemented for n in (2, 3), got {F.dim}")
    points, non_isolated = plane_curves.singular_points(F)
    if non_isolated:
        raise NonGenericInputError("critical locus is not finite")
    return [(p.coords, p.is_real) for p in points]


def isotropy_samples(label: TernaryLabel) -> list[LinearTransform]:
    """Sample elements ``g`` of the isotropy group, ``N o g = N`` for the normal form ``N``."""

    label = TernaryLabel(label)
    h = Fraction
    samples: dict[TernaryLabel, list[list[list[Any]]]] = {
        TernaryLabel.ZERO: [[[1, 2, 0], [0, 1, 3], [1, 0, 1]]],
        TernaryLabel.PERFECT_CUBE: [[[1, 0, 0], [2, 3, 1], [1, 1, 1]]],
        TernaryLabel.SQUARE_TIMES_INDEP_LINEAR: [[[2, 0, 0], [0, h(1, 4), 0], [1, 5, 3]]],
        TernaryLabel.THREE_DISTINCT_DEPENDENT_FACTORS: [[[0, -1, 0], [1, -1, 0], [2, 1, 1]]],
        TernaryLabel.LINEAR_TIMES_DEPENDENT_SEMIDEF_QUAD: [[[1, 0, 0], [0, -1, 0], [1, 2, -1]]],
        TernaryLabel.THREE_INDEPENDENT_FACTORS: [
            [[2, 0, 0], [0, 3, 0], [0, 0, h(1, 6)]],
            [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
        ],
        TernaryLabel.LINEAR_TIMES_INDEP_SEMIDEF_QUAD: [[[0, -2, 0], [2, 0, 0], [0, 0, h(1, 4)]]],
        TernaryLabel.NULL_LINEAR_TIMES_LORENTZ_QUAD: [[[4, 0, 0], [1, h(1, 2), 0], [h(1, 4), h(1, 4), h(1, 16)]]],
        TernaryLabel.DEF_LINEAR_TIMES_LORENTZ_QUAD: [
            [[0, -1, 0], [1, 0, 0], [0, 0, 1]],
            [[1, 0, 0], [0, -1, 0], [0, 0, 1]],
        ],
        TernaryLabel.SPLIT_LINEAR_TIMES_LORENTZ_QUAD: [
            [[1, 0, 0], [0, h(5, 4), h(3, 4)], [0, h(3, 4), h(5, 4)]],
            [[1, 0, 0], [0, -1, 0], [0, 0, 1]],
        ],
        TernaryLabel.LINEAR_TIMES_DEFINITE_QUAD: [
            [[1, 0, 0], [0, 0, -1], [0, 1, 0]],
            [[1, 0, 0], [0, h(3, 5), h(-4, 5)], [0, h(4, 5), h(3, 5)]],
        ],
        TernaryLabel.CUSPIDAL: [[[1, 0, 0], [0, 3, 0], [0, 0, h(1, 9)]]],
        TernaryLabel.REAL_NODAL: [[[1, 0, 0], [0, -1, 0], [0, 0, 1]]],
        TernaryLabel.IMAGINARY_NODAL: [[[1, 0, 0], [0, -1, 0], [0, 0, 1]]],
        TernaryLabel.NONSINGULAR: [
            [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
            [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
        ],
    }
    return [LinearTransform.from_rows(rows) for rows in samples[label]]


def witness_residual(F: HomogeneousForm, T: LinearTransform, target: HomogeneousForm) -> float:
    """Relative size of ``F o T - target``."""

    error = (change_variables(F.as_float(), T.as_float()) - target.as_float()).max_abs() / max(1.0, F.max_abs())
    if error > WITNESS_RESIDUAL_TOL:
        logger.warning("ternary witness has residual %.3e", error)
    return error
