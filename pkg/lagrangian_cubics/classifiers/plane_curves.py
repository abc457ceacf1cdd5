"""Numerics for plane curves: common zeros, singular points, flexes and real circuits.

Common zeros of ternary forms are found in a generic affine chart.  Two
generic combinations of the forms are dehomogenized and their resultant is
computed exactly (floats are converted to their exact binary rationals).  Each
distinct root of its square-free part is found to ``ROOT_DIGITS`` digits and
gives one point through the degree-one subresultant; candidates are polished
by Gauss-Newton on all forms, clustered and checked before the chart is undone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import logging
from typing import Optional, Sequence

import mpmath
from mpmath.libmp.libhyper import NoConvergence
import numpy as np
import sympy as sp

from ..lc_core import linalg
from ..lc_core.errors import InvalidInputError, NonConvergenceError
from ..lc_core.forms import HomogeneousForm, LinearTransform, change_variables, polarize

logger = logging.getLogger(__name__)

CLUSTER_TOL = 1e-9
FLOAT_CLUSTER_TOL = 1e-3
RESIDUAL_TOL = 1e-9
REAL_TOL = 1e-8
CANDIDATE_TOL = 1e-3
FLOAT_SINGULAR_TOL = 1e-7
AMBIGUOUS_TOL = 1e-5
RANK_TOL_LOW = 1e-7
RANK_TOL_HIGH = 1e-4
ROOT_DIGITS = 30
FIBRE_TOL = 1e-20
RATIONAL_DENOMINATOR = 10**9

# generic charts, tried in order
_CHARTS = (
    ((3, -1, 2), (1, 4, -3), (2, 1, 5)),
    ((5, 2, -1), (-2, 3, 4), (1, -3, 2)),
    ((2, 7, 1), (-3, 1, 6), (4, -2, 3)),
    ((1, -4, 3), (6, 1, -2), (-1, 2, 7)),
)

# weights of the two combinations that replace a system of equal-degree forms
_PENCILS = (
    ((1, 2, -3), (3, -1, 2)),
    ((2, -1, 1), (1, 3, -2)),
    ((-3, 1, 4), (2, 5, 1)),
    ((1, 1, 2), (4, -3, 1)),
)

_X, _Y = sp.symbols("x y")


@dataclass(frozen=True)
class CommonZeros:
    points: list[np.ndarray]
    non_isolated: bool = False
    multiplicities: tuple[int, ...] = ()
    residuals: tuple[float, ...] = ()
    ambiguous: bool = False


def normalize_point(point: Sequence[complex]) -> np.ndarray:
    """Scale so that the largest coordinate is exactly 1."""

    p = np.asarray(point, dtype=complex)
    return p / p[int(np.argmax(np.abs(p)))]


def imaginary_size(point: np.ndarray) -> float:
    return float(np.max(np.abs(np.imag(normalize_point(point)))))


def is_real_point(point: np.ndarray, tol: float = REAL_TOL) -> bool:
    return imaginary_size(point) < tol


def real_part(point: np.ndarray) -> np.ndarray:
    return np.real(normalize_point(point))


def _exact(F: HomogeneousForm) -> HomogeneousForm:
    if F.is_exact:
        return F
    return HomogeneousForm(F.dim, F.degree, {k: Fraction(float(v)) for k, v in F.coeffs.items()})


def _dehomogenize(F: HomogeneousForm) -> sp.Poly:
    expr = F.to_sympy((_X, _Y, sp.Integer(1)))
    return sp.Poly(expr, _X, _Y)


def _mp(value: sp.Expr) -> mpmath.mpf:
    rational = sp.Rational(value)
    return mpmath.mpf(int(rational.p)) / int(rational.q)


def _mp_roots(coeffs: Sequence[object]) -> list[mpmath.mpc]:
    """Roots of a polynomial given by its coefficients, highest first, at the working precision."""

    coeffs = list(coeffs)
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) <= 1:
        return []
    try:
        return list(mpmath.polyroots(coeffs, maxsteps=200, extraprec=4 * ROOT_DIGITS))
    except NoConvergence:
        logger.debug("polyroots did not converge, retrying with more precision")
    try:
        return list(mpmath.polyroots(coeffs, maxsteps=2000, extraprec=1000))
    except NoConvergence:
        logger.debug("falling back to companion matrix roots")
        return [mpmath.mpc(complex(r)) for r in np.roots([complex(c) for c in coeffs])]


def _univariate_roots(poly: sp.Poly) -> list[mpmath.mpc]:
    if poly.degree() <= 0:
        return []
    return _mp_roots([_mp(c) for c in poly.all_coeffs()])


def _mp_polyval(poly: sp.Poly, x: mpmath.mpc) -> tuple[mpmath.mpc, mpmath.mpf]:
    """Value of a univariate polynomial at ``x`` and the size of its terms there."""

    coeffs = [_mp(c) for c in poly.all_coeffs()]
    size = sum(abs(c) for c in coeffs) * max(1, abs(x)) ** (len(coeffs) - 1)
    return mpmath.polyval(coeffs, x), size


def _eval_complex(F: HomogeneousForm, p: np.ndarray) -> complex:
    total = 0j
    for exp, c in F.coeffs.items():
        term = complex(float(c))
        for xi, e in zip(p, exp):
            if e:
                term *= xi**e
        total += term
    return total


class _System:
    """Values and Jacobian of several forms at complex points."""

    def __init__(self, forms: Sequence[HomogeneousForm]) -> None:
        self.forms = [f.as_float() for f in forms]
        self.grads = [f.gradient() for f in self.forms]
        self.scales = np.array([max(f.max_abs(), 1e-300) for f in self.forms])

    def values(self, p: np.ndarray) -> np.ndarray:
        return np.array([_eval_complex(f, p) for f in self.forms])

    def jacobian(self, p: np.ndarray) -> np.ndarray:
        return np.array([[_eval_complex(g, p) for g in grad] for grad in self.grads])

    def residual(self, p: np.ndarray) -> float:
        """Scale-free residual at the unit representative of ``p``."""

        unit = np.asarray(p, dtype=complex) / np.linalg.norm(p)
        return float(np.max(np.abs(self.values(unit)) / self.scales))

    def polish(self, p: np.ndarray, iterations: int = 100) -> tuple[np.ndarray, float]:
        """Gauss-Newton in the affine chart ``p[2] = 1``; linear convergence at multiple zeros."""

        best = np.asarray(p, dtype=complex)
        best_res = self.residual(best)
        for _ in range(iterations):
            if best_res < 1e-15:
                break
            J = self.jacobian(best)[:, :2]
            step, *_ = np.linalg.lstsq(J, -self.values(best), rcond=1e-12)
            candidate = best + np.array([step[0], step[1], 0.0])
            res = self.residual(candidate)
            if res >= best_res:
                break
            best, best_res = candidate, res
        return best, best_res


def _cluster(
    candidates: list[tuple[np.ndarray, float]], tol: float
) -> list[list[tuple[np.ndarray, float]]]:
    clusters: list[list[tuple[np.ndarray, float]]] = []
    for point, residual in sorted(candidates, key=lambda c: c[1]):
        p = normalize_point(point)
        for members in clusters:
            if np.max(np.abs(normalize_point(members[0][0]) - p)) < tol:
                members.append((point, residual))
                break
        else:
            clusters.append([(point, residual)])
    return clusters


def _at_infinity(forms: Sequence[HomogeneousForm]) -> tuple[list[np.ndarray], bool]:
    """Common zeros on the line ``z = 0`` of the chart, found through an exact gcd."""

    restricted = [sp.expand(f.to_sympy((_X, _Y, sp.Integer(0)))) for f in forms]
    common = sp.Integer(0)
    for expr in restricted:
        common = sp.gcd(common, expr)
    if common == 0:
        return [], True
    poly = sp.Poly(common, _X, _Y)
    if poly.total_degree() <= 0:
        return [], False
    on_chart = sp.Poly(common.subs(_Y, 1), _X)
    with mpmath.workdps(ROOT_DIGITS):
        points = [np.array([complex(root), 1.0, 0.0], dtype=complex) for root in _univariate_roots(on_chart)]
    if on_chart.degree() < poly.total_degree():
        points.append(np.array([1.0, 0.0, 0.0], dtype=complex))
    return points, False


def _pencil_pair(forms: Sequence[HomogeneousForm], attempt: int) -> tuple[HomogeneousForm, HomogeneousForm]:
    """Two forms whose common zeros contain those of the whole system."""

    if len(forms) == 2 or len({f.degree for f in forms}) != 1:
        return forms[0], forms[1]
    weights = _PENCILS[attempt % len(_PENCILS)]
    pair = []
    for row in weights:
        total = forms[0].scale(row[0])
        for form, w in zip(forms[1:], row[1:] + (1,) * len(forms)):
            total = total + form.scale(w)
        pair.append(total)
    return pair[0], pair[1]


def _linear_subresultant(f: sp.Poly, g: sp.Poly) -> Optional[tuple[sp.Poly, sp.Poly]]:
    """``(s1, s0)`` with ``s1(x) y + s0(x)`` the degree-one subresultant of ``f, g`` in ``y``."""

    first, second = sorted((f, g), key=lambda p: -p.degree(_Y))
    for element in sp.subresultants(first.as_expr(), second.as_expr(), _Y):
        poly = sp.Poly(element, _Y)
        if poly.degree() == 1:
            s1, s0 = poly.all_coeffs()
            return sp.Poly(s1, _X), sp.Poly(s0, _X)
    return None


def _fibre(f: sp.Poly, linear: Optional[tuple[sp.Poly, sp.Poly]], xr: mpmath.mpc) -> list[mpmath.mpc]:
    """Values of ``y`` over the root ``x = xr`` of the resultant."""

    if linear is not None:
        s1, size1 = _mp_polyval(linear[0], xr)
        s0, _ = _mp_polyval(linear[1], xr)
        if abs(s1) > FIBRE_TOL * max(size1, 1):
            return [-s0 / s1]
    # two zeros share this x, or the remainder sequence is defective
    in_y = sp.Poly(f.as_expr(), _Y)
    coeffs = [_mp_polyval(sp.Poly(c, _X), xr)[0] for c in in_y.all_coeffs()]
    return _mp_roots(coeffs)


def _zeros_in_chart(
    moved: Sequence[HomogeneousForm], attempt: int, residual_tol: float, cluster_tol: float
) -> Optional[CommonZeros]:
    f_form, g_form = _pencil_pair(moved, attempt)
    f, g = _dehomogenize(f_form), _dehomogenize(g_form)
    resultant = sp.Poly(sp.resultant(f.as_expr(), g.as_expr(), _Y), _X)
    if resultant.is_zero:
        return None
    linear = _linear_subresultant(f, g)
    system = _System(moved)
    candidates: list[tuple[np.ndarray, float]] = []
    with mpmath.workdps(ROOT_DIGITS):
        for xr in _univariate_roots(sp.Poly(sp.sqf_part(resultant.as_expr()), _X)):
            for yr in _fibre(f, linear, xr):
                candidate = np.array([complex(xr), complex(yr), 1.0], dtype=complex)
                if not np.all(np.isfinite(candidate)) or system.residual(candidate) > CANDIDATE_TOL:
                    continue
                candidates.append(system.polish(candidate))
    infinite, non_isolated = _at_infinity(moved)
    if non_isolated:
        return CommonZeros([], non_isolated=True)
    candidates.extend((p, system.residual(p)) for p in infinite)
    points: list[np.ndarray] = []
    multiplicities: list[int] = []
    residuals: list[float] = []
    ambiguous = False
    for members in _cluster(candidates, cluster_tol):
        point, residual = members[0]
        if residual < residual_tol:
            points.append(point)
            multiplicities.append(len(members))
            residuals.append(residual)
        elif residual < AMBIGUOUS_TOL:
            logger.debug("candidate zero with residual %.3e is neither accepted nor rejected", residual)
            ambiguous = True
    return CommonZeros(points, False, tuple(multiplicities), tuple(residuals), ambiguous)


def common_zeros(
    forms: Sequence[HomogeneousForm],
    residual_tol: float = RESIDUAL_TOL,
    *,
    cluster_tol: Optional[float] = None,
    max_points: Optional[int] = None,
) -> CommonZeros:
    """All common complex projective zeros of ternary forms, when finitely many.

    Every distinct root of the eliminant yields at most one point, so a zero is
    never reported twice.  A chart that produces more than ``max_points``
    zeros (the Bezout bound of the caller) is abandoned for the next one.
    """

    if len(forms) < 2:
        raise InvalidInputError("need at least two forms")
    if any(f.dim != 3 for f in forms):
        raise InvalidInputError("common_zeros works on ternary forms")
    if cluster_tol is None:
        cluster_tol = CLUSTER_TOL if all(f.is_exact for f in forms) else FLOAT_CLUSTER_TOL
    crowded: Optional[CommonZeros] = None
    for attempt, rows in enumerate(_CHARTS):
        chart = LinearTransform.from_rows(rows)
        moved = [change_variables(_exact(f), chart) for f in forms]
        moved = [f for f in moved if not f.is_zero()]
        if len(moved) < 2:
            return CommonZeros([], non_isolated=True)
        zeros = _zeros_in_chart(moved, attempt, residual_tol, cluster_tol)
        if zeros is None:
            logger.debug("resultant vanishes identically in chart %d", attempt)
            continue
        if zeros.non_isolated:
            return zeros
        if max_points is not None and len(zeros.points) > max_points:
            logger.debug("chart %d gave %d zeros, more than %d", attempt, len(zeros.points), max_points)
            crowded = zeros
            continue
        matrix = linalg.as_float_array(chart.matrix)
        return CommonZeros(
            [normalize_point(matrix @ p) for p in zeros.points],
            False,
            zeros.multiplicities,
            zeros.residuals,
            zeros.ambiguous,
        )
    if crowded is not None:
        raise NonConvergenceError(f"more than {max_points} common zeros in every chart")
    return CommonZeros([], non_isolated=True)


@dataclass(frozen=True)
class ProjectiveSingularPoint:
    coords: np.ndarray
    is_real: bool
    local_type: str
    hessian_rank: int = 0
    multiplicity: int = 1
    near_degenerate: bool = False

    def as_record(self) -> dict[str, object]:
        c = normalize_point(self.coords)
        return {
            "coords": [[float(v.real), float(v.imag)] for v in c] if not self.is_real else [float(v.real) for v in c],
            "is_real": self.is_real,
            "local_type": self.local_type,
        }


@dataclass(frozen=True)
class SingularLocus:
    points: list[ProjectiveSingularPoint]
    non_isolated: bool = False
    ambiguous: bool = False

    @property
    def near_degenerate(self) -> bool:
        return self.ambiguous or any(p.near_degenerate for p in self.points)


NODE_REAL = "node_real_branches"
NODE_IMAGINARY = "node_imaginary_branches"
NODE_COMPLEX_POINT = "node"
CUSP = "cusp"
HIGHER = "higher"


def hessian_matrix(F: HomogeneousForm, p: np.ndarray) -> np.ndarray:
    G = F.as_float()
    return np.array([[_eval_complex(G.partial(i).partial(j), p) for j in range(3)] for i in range(3)])


def _rational_point(F: HomogeneousForm, p: np.ndarray) -> Optional[list[Fraction]]:
    """The exact singular point near ``p`` when ``F`` is rational and the point is too."""

    if not F.is_exact or not is_real_point(p):
        return None
    candidate = [Fraction(float(v)).limit_denominator(RATIONAL_DENOMINATOR) for v in real_part(p)]
    if all(g(candidate) == 0 for g in F.gradient()):
        return candidate
    return None


def _exact_local_type(F: HomogeneousForm, point: list[Fraction]) -> tuple[str, int]:
    H = F.hessian_at(point)
    rank = linalg.rank(H)
    if rank == 0:
        return HIGHER, rank
    if rank == 1:
        return CUSP, rank
    complement = linalg.nullspace(linalg.as_exact_array([point]))
    det = linalg.det(complement.T.dot(H).dot(complement))
    return (NODE_REAL if det < 0 else NODE_IMAGINARY), rank


def local_type(F: HomogeneousForm, p: np.ndarray, multiplicity: int = 1) -> tuple[str, int, bool]:
    """Type of the singular point ``p``, the rank of the Hessian there and a near-degenerate flag.

    Rational points of rational forms are typed exactly.  Otherwise the rank is
    read from the ratio of the two leading singular values of the Hessian; a
    ratio between ``RANK_TOL_LOW`` and ``RANK_TOL_HIGH`` is decided by the
    multiplicity of the zero and flagged.
    """

    exact_point = _rational_point(F, p)
    if exact_point is not None:
        kind, rank = _exact_local_type(F, exact_point)
        return kind, rank, False
    unit = normalize_point(p) / np.linalg.norm(normalize_point(p))
    values = np.linalg.svd(hessian_matrix(F, unit), compute_uv=False)
    if values[0] <= 1e-12 * max(F.max_abs(), 1e-300):
        return HIGHER, 0, False
    ratio = values[1] / values[0]
    near = RANK_TOL_LOW <= ratio <= RANK_TOL_HIGH
    if near:
        rank = 1 if multiplicity > 1 else 2
    else:
        rank = 1 if ratio < RANK_TOL_LOW else 2
    if rank == 1:
        return CUSP, rank, near
    if not is_real_point(p):
        return NODE_COMPLEX_POINT, rank, near
    point = real_part(p)
    H = np.real(hessian_matrix(F, point / np.linalg.norm(point)))
    complement = linalg.nullspace(point.reshape(1, 3))
    det = float(np.linalg.det(complement.T @ H @ complement))
    return (NODE_REAL if det < 0 else NODE_IMAGINARY), rank, near


def singular_locus(F: HomogeneousForm) -> SingularLocus:
    """Isolated complex singular points of ``F = 0`` with their types and flags."""

    if F.dim != 3:
        raise InvalidInputError("singular_points works on ternary forms")
    if F.is_zero():
        raise InvalidInputError("the zero form is singular everywhere")
    # a reduced cubic has at most three singular points
    zeros = common_zeros(
        F.gradient(),
        RESIDUAL_TOL if F.is_exact else FLOAT_SINGULAR_TOL,
        max_points=3 if F.degree == 3 else None,
    )
    out = []
    multiplicities = zeros.multiplicities or (1,) * len(zeros.points)
    for p, multiplicity in zip(zeros.points, multiplicities):
        kind, rank, near = local_type(F, p, multiplicity)
        real = is_real_point(p)
        coords = real_part(p).astype(complex) if real else normalize_point(p)
        out.append(ProjectiveSingularPoint(coords, real, kind, rank, multiplicity, near))
    out.sort(key=lambda s: (not s.is_real, tuple(np.round(np.real(s.coords), 9)), tuple(np.round(np.imag(s.coords), 9))))
    return SingularLocus(out, zeros.non_isolated, zeros.ambiguous)


def singular_points(F: HomogeneousForm) -> tuple[list[ProjectiveSingularPoint], bool]:
    """Isolated complex singular points of the curve ``F = 0`` and a non-isolated flag."""

    locus = singular_locus(F)
    return locus.points, locus.non_isolated


def hessian_curve(F: HomogeneousForm) -> HomogeneousForm:
    """The determinant of the matrix of second partials, a cubic for cubic ``F``."""

    symbols = sp.symbols("x y z")
    expr = F.to_sympy(symbols)
    det = sp.expand(sp.hessian(expr, symbols).det())
    if det == 0:
        return HomogeneousForm.zero(3, 3 * (F.degree - 2), F.scalar_mode)
    return HomogeneousForm.from_sympy(det, symbols, F.scalar_mode)


def flexes(F: HomogeneousForm) -> list[np.ndarray]:
    """The inflection points ``F = Hess(F) = 0``; nine for a nonsingular cubic."""

    H = hessian_curve(F)
    if H.is_zero():
        raise InvalidInputError("Hessian curve vanishes identically")
    bound = F.degree * H.degree if F.degree == 3 else None
    zeros = common_zeros([F, H], max_points=bound)
    if zeros.non_isolated:
        raise NonConvergenceError("curve and Hessian share a component")
    return zeros.points


def line_through(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Coefficients of the line through two points, made real when possible."""

    line = np.cross(p, q)
    return normalize_point(line)


def _binary_restriction(tensor: np.ndarray, origin: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Coefficients of ``t -> F(origin + t direction)`` from the cubic's tensor, highest first."""

    def contract(*vectors: np.ndarray) -> float:
        out = tensor
        for v in vectors:
            out = np.tensordot(v, out, axes=([0], [0]))
        return float(out)

    a0 = contract(origin, origin, origin) / 6
    a1 = 3 * contract(origin, origin, direction) / 6
    a2 = 3 * contract(origin, direction, direction) / 6
    a3 = contract(direction, direction, direction) / 6
    return np.array([a3, a2, a1, a0])


def _real_angles(coeffs: np.ndarray, tol: float = 1e-6) -> list[float]:
    """Real roots ``[s:t]`` of a real binary cubic as angles in ``[0, pi)``."""

    scale = float(np.max(np.abs(coeffs)))
    trimmed = coeffs.copy()
    angles: list[float] = []
    if abs(trimmed[0]) < 1e-12 * scale:
        angles.append(np.pi / 2)
        trimmed = trimmed[1:]
    roots = np.roots(trimmed) if len(trimmed) > 1 else np.array([])
    if len(roots) == 3:
        order = np.argsort(np.abs(np.imag(roots)))
        roots = roots[order]
        keep = 3 if abs(roots[1].imag) < tol * (1 + abs(roots[1])) and abs(roots[2].imag) < tol * (1 + abs(roots[2])) else 1
        roots = roots[:keep]
    else:
        roots = np.array([r for r in roots if abs(r.imag) < tol * (1 + abs(r))])
    for t in roots:
        angles.append(float(np.arctan(np.real(t))) % np.pi)
    return sorted(angles)


def _circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % np.pi
    return min(d, np.pi - d)


class _UnionFind:
    def __init__(self) -> None:
        self.parent: list[int] = []

    def make(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _match(previous: list[tuple[float, int]], current: list[float], uf: _UnionFind) -> list[tuple[float, int]]:
    """Carry arc labels from one line of the pencil to the next."""

    if len(previous) == len(current):
        k = len(current)
        best_shift, best_cost = 0, np.inf
        for shift in range(k):
            cost = sum(_circular_distance(previous[(i + shift) % k][0], current[i]) for i in range(k))
            if cost < best_cost:
                best_shift, best_cost = shift, cost
        return [(current[i], previous[(i + best_shift) % k][1]) for i in range(k)]
    if len(previous) == 1 and len(current) == 3:
        pair = _closest_pair(current)
        lone = next(i for i in range(3) if i not in pair)
        arc = uf.make()
        out = [(0.0, 0)] * 3
        out[lone] = (current[lone], previous[0][1])
        for i in pair:
            out[i] = (current[i], arc)
        return out
    if len(previous) == 3 and len(current) == 1:
        angles = [a for a, _ in previous]
        pair = _closest_pair(angles)
        uf.union(previous[pair[0]][1], previous[pair[1]][1])
        lone = next(i for i in range(3) if i not in pair)
        return [(current[0], previous[lone][1])]
    raise NonConvergenceError("inconsistent root counts while sampling the real locus")


def _closest_pair(angles: Sequence[float]) -> tuple[int, int]:
    pairs = [(0, 1), (1, 2), (0, 2)]
    return min(pairs, key=lambda ij: _circular_distance(angles[ij[0]], angles[ij[1]]))


def count_circuits_by_sampling(F: HomogeneousForm, lines: int = 720, seed: int = 0) -> int:
    """Connected components of the real locus, tracked along a pencil of lines.

    The pencil is centred at a random point off the curve; real intersections
    are followed line to line, arcs born or dying at tangencies are merged and
    the pencil's wrap-around identifies ``[s:t]`` with ``[s:-t]``.
    """

    if F.dim != 3 or F.degree != 3:
        raise InvalidInputError("circuit sampling works on ternary cubics")
    tensor = polarize(F.as_float()).entries
    rng = np.random.default_rng(seed)
    while True:
        centre = rng.normal(size=3)
        centre /= np.linalg.norm(centre)
        if abs(_binary_restriction(tensor, centre, centre)[3]) > 1e-3 * F.max_abs():
            break
    basis = linalg.nullspace(centre.reshape(1, 3))
    a, b = basis[:, 0], basis[:, 1]
    uf = _UnionFind()
    first: list[tuple[float, int]] = []
    previous: list[tuple[float, int]] = []
    for step in range(lines):
        theta = np.pi * step / lines
        direction = np.cos(theta) * a + np.sin(theta) * b
        angles = _real_angles(_binary_restriction(tensor, centre, direction))
        if step == 0:
            previous = [(angle, uf.make()) for angle in angles]
            first = list(previous)
            continue
        previous = _match(previous, angles, uf)
    # direction -> -direction at theta = pi maps the angle phi to pi - phi
    wrapped = sorted(((np.pi - angle) % np.pi, arc) for angle, arc in previous)
    closing = _match(wrapped, [angle for angle, _ in first], uf)
    for (_, arc_end), (_, arc_start) in zip(closing, first):
        uf.union(arc_end, arc_start)
    return len({uf.find(i) for i in range(len(uf.parent))})
