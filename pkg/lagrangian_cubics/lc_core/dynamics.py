"""Quadratic Hamiltonians, affine symplectic frames and homogeneous curves.

Coordinates on the symplectic space are ``v = (q_1..q_n, p_1..p_n)`` with
``Omega = dq^i ^ dp_i``, so ``Omega(a, b) = a^T J b`` for the matrix ``J``
returned by :func:`j_map`.  Hamilton's equations read ``xdot = J grad H`` and
the bracket is ``{f, g} = grad(g)^T J grad(f)``, the derivative of ``g`` along
the flow of ``f``.  With this convention ``{p, q} = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import logging
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linear_sum_assignment
import sympy as sp

from . import linalg
from .errors import InvalidInputError, NonGenericInputError
from .forms import SymTensor, depolarize, unused_directions
from .utils import as_fraction, is_exact_scalar, make_rng, to_sympy_scalar

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "v1"
GENERICITY_TOL = 1e-8
FRAME_TOL = 1e-10
ORACLE_TOL = 1e-9


def j_map(n: int) -> np.ndarray:
    """The matrix ``J`` with ``Omega(J xi, w) = xi(w)``; it is also the matrix of ``Omega``."""

    if n < 1:
        raise InvalidInputError("n must be positive")
    eye = np.eye(n, dtype=int)
    zero = np.zeros((n, n), dtype=int)
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_pairing(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=float)
    return float(a @ j_map(a.shape[0] // 2) @ np.asarray(b, dtype=float))


def hamiltonian_symbols(n: int) -> tuple[sp.Symbol, ...]:
    return tuple(sp.symbols(f"q1:{n + 1}")) + tuple(sp.symbols(f"p1:{n + 1}"))


def _array(values: Any, shape: tuple[int, ...], name: str) -> np.ndarray:
    array = linalg.coerce_array(values) if np.size(values) else np.zeros(shape)
    if array.shape != shape:
        raise InvalidInputError(f"{name} has shape {array.shape}, expected {shape}")
    return array


def _scalar(value: Any) -> Any:
    if is_exact_scalar(value) or isinstance(value, str):
        return as_fraction(value)
    return float(value)


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """``h(v) = 1/2 <A v, v> + <xi, v> + c`` on symplectic ``R^2n``."""

    A: np.ndarray
    xi: np.ndarray
    c: Any = 0

    def __post_init__(self) -> None:
        A = np.atleast_2d(linalg.coerce_array(self.A))
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] % 2:
            raise InvalidInputError(f"A must be a square matrix of even size, got shape {A.shape}")
        if not linalg.is_symmetric(A):
            raise InvalidInputError("A must be symmetric")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "xi", _array(self.xi, (A.shape[0],), "xi"))
        object.__setattr__(self, "c", _scalar(self.c))

    @property
    def n(self) -> int:
        return self.A.shape[0] // 2

    @classmethod
    def zero(cls, n: int) -> "QuadraticHamiltonian":
        return cls(np.zeros((2 * n, 2 * n)), np.zeros(2 * n), 0.0)

    @classmethod
    def constant(cls, n: int, c: Any = 1) -> "QuadraticHamiltonian":
        return cls(np.zeros((2 * n, 2 * n)), np.zeros(2 * n), c)

    @classmethod
    def from_polynomial(
        cls, expr: Union[str, sp.Expr], n: int, symbols: Optional[Sequence[sp.Symbol]] = None
    ) -> "QuadraticHamiltonian":
        """Read off ``(A, xi, c)`` from a polynomial of degree at most two."""

        symbols = tuple(symbols) if symbols is not None else hamiltonian_symbols(n)
        if len(symbols) != 2 * n:
            raise InvalidInputError(f"need {2 * n} symbols, got {len(symbols)}")
        expr = sp.sympify(expr, locals={str(s): s for s in symbols})
        stray = expr.free_symbols - set(symbols)
        if stray:
            raise InvalidInputError(f"unknown symbols {sorted(map(str, stray))}")
        if not is_flow_affine(expr, symbols):
            raise InvalidInputError(f"{expr} is not a polynomial of degree at most 2")
        origin = {s: 0 for s in symbols}
        hess = sp.hessian(expr, symbols).subs(origin)
        grad = [sp.diff(expr, s).subs(origin) for s in symbols]
        const = expr.subs(origin)
        values = list(hess) + grad + [const]
        if all(v.is_Rational for v in values):
            convert: Callable[[sp.Expr], Any] = as_fraction
        else:
            convert = lambda v: float(sp.N(v))  # noqa: E731
        A = np.array([[convert(hess[i, j]) for j in range(2 * n)] for i in range(2 * n)], dtype=object)
        xi = np.array([convert(v) for v in grad], dtype=object)
        return cls(A, xi, convert(const))

    def to_sympy(self, symbols: Optional[Sequence[sp.Symbol]] = None) -> sp.Expr:
        symbols = tuple(symbols) if symbols is not None else hamiltonian_symbols(self.n)
        v = sp.Matrix(symbols)
        A = linalg.to_sympy_matrix(self.A)
        xi = linalg.to_sympy_matrix(self.xi.reshape(1, -1))
        c = to_sympy_scalar(self.c)
        return sp.expand((v.T * A * v)[0, 0] / 2 + (xi * v)[0, 0] + c)

    def evaluate(self, v: Sequence[float]) -> float:
        v = np.asarray(v, dtype=float)
        A, xi = self.as_float_parts()
        return float(0.5 * v @ A @ v + xi @ v + float(self.c))

    def gradient(self, v: Sequence[float]) -> np.ndarray:
        A, xi = self.as_float_parts()
        return A @ np.asarray(v, dtype=float) + xi

    def as_float_parts(self) -> tuple[np.ndarray, np.ndarray]:
        return linalg.as_float_array(self.A), linalg.as_float_array(self.xi)

    def max_abs_difference(self, other: "QuadraticHamiltonian") -> float:
        if other.n != self.n:
            raise InvalidInputError("dimension mismatch")
        A, xi = self.as_float_parts()
        B, eta = other.as_float_parts()
        return max(
            float(np.max(np.abs(A - B))),
            float(np.max(np.abs(xi - eta))),
            abs(float(self.c) - float(other.c)),
        )

    def __add__(self, other: "QuadraticHamiltonian") -> "QuadraticHamiltonian":
        if other.n != self.n:
            raise InvalidInputError("dimension mismatch")
        return QuadraticHamiltonian(self.A + other.A, self.xi + other.xi, self.c + other.c)

    def scale(self, factor: Any) -> "QuadraticHamiltonian":
        return QuadraticHamiltonian(self.A * factor, self.xi * factor, self.c * factor)

    def as_record(self) -> dict[str, Any]:
        def plain(value: Any) -> Any:
            return str(value) if is_exact_scalar(value) else float(value)

        return {
            "schema": SCHEMA_VERSION,
            "n": self.n,
            "A": [[plain(v) for v in row] for row in self.A],
            "xi": [plain(v) for v in self.xi],
            "c": plain(self.c),
        }

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> "QuadraticHamiltonian":
        try:
            n = int(record["n"])
            A = np.array(record["A"], dtype=object).reshape(2 * n, 2 * n)
            xi = np.array(record.get("xi", [0] * (2 * n)), dtype=object)
            c = record.get("c", 0)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed Hamiltonian record: {exc}") from exc
        return cls(A, xi, c)


def _check_pair(f: QuadraticHamiltonian, g: QuadraticHamiltonian) -> None:
    if f.n != g.n:
        raise InvalidInputError(f"dimension mismatch: {f.n} vs {g.n}")


def bracket_oracle(f: QuadraticHamiltonian, g: QuadraticHamiltonian) -> QuadraticHamiltonian:
    """``{f, g} = sum_i dg/dq_i df/dp_i - dg/dp_i df/dq_i`` by symbolic differentiation."""

    _check_pair(f, g)
    n = f.n
    symbols = hamiltonian_symbols(n)
    q, p = symbols[:n], symbols[n:]
    F, G = f.to_sympy(symbols), g.to_sympy(symbols)
    expr = sum(sp.diff(G, q[i]) * sp.diff(F, p[i]) - sp.diff(G, p[i]) * sp.diff(F, q[i]) for i in range(n))
    return QuadraticHamiltonian.from_polynomial(sp.expand(expr), n, symbols)


def poisson_bracket(
    f: QuadraticHamiltonian, g: QuadraticHamiltonian, check: bool = False
) -> QuadraticHamiltonian:
    """Bracket of ``f = (A, xi, a)`` and ``g = (B, eta, b)``.

    Returns ``(BJA - AJB, BJ xi - AJ eta, <eta, J xi>)``.  With ``check`` set, or
    when DEBUG logging is on, the result is compared against :func:`bracket_oracle`.
    """

    _check_pair(f, g)
    J = j_map(f.n)
    A, xi, B, eta = f.A, f.xi, g.A, g.xi
    quadratic = B @ J @ A - A @ J @ B
    linear = B @ J @ xi - A @ J @ eta
    const = eta @ J @ xi
    result = QuadraticHamiltonian(quadratic, linear, const)
    if check or logger.isEnabledFor(logging.DEBUG):
        deviation = result.max_abs_difference(bracket_oracle(f, g))
        logger.debug("bracket vs symbolic oracle: %.3e", deviation)
        if deviation > ORACLE_TOL * max(1.0, _magnitude(f) * _magnitude(g)):
            raise AssertionError(f"bracket formula disagrees with symbolic oracle by {deviation:.3e}")
    return result


def _magnitude(f: QuadraticHamiltonian) -> float:
    A, xi = f.as_float_parts()
    return max(float(np.max(np.abs(A))), float(np.max(np.abs(xi))), 1.0)


def hamiltonian_matrix(f: QuadraticHamiltonian) -> np.ndarray:
    """``[[JA, J xi, 0], [0, 0, 0], [0, 0, c]]`` of size ``2n + 2``.

    On the affine block (the first ``2n + 1`` rows and columns) this is an
    anti-homomorphism: the block of ``{f, g}`` is ``-[M_f, M_g]``.  The
    central entry ``c`` is carried but not produced by the commutator.
    """

    n = f.n
    J = j_map(n)
    A, xi = f.as_float_parts()
    M = np.zeros((2 * n + 2, 2 * n + 2))
    M[: 2 * n, : 2 * n] = J @ A
    M[: 2 * n, 2 * n] = J @ xi
    M[2 * n + 1, 2 * n + 1] = float(f.c)
    return M


def flow_matrix(f: QuadraticHamiltonian, t: float) -> np.ndarray:
    """Affine ``(2n + 1)``-square matrix of the time-``t`` flow."""

    n = f.n
    return expm(t * hamiltonian_matrix(f)[: 2 * n + 1, : 2 * n + 1])


def flow(f: QuadraticHamiltonian, t: float, x0: Sequence[float]) -> np.ndarray:
    """Solution of ``xdot = J A x + J xi`` at time ``t`` starting at ``x0``."""

    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (2 * f.n,):
        raise InvalidInputError(f"x0 must have length {2 * f.n}")
    E = flow_matrix(f, t)
    return E[: 2 * f.n, : 2 * f.n] @ x0 + E[: 2 * f.n, 2 * f.n]


def hamiltonian_vector_field(
    H: Union[str, sp.Expr], n: int, symbols: Optional[Sequence[sp.Symbol]] = None
) -> Callable[[np.ndarray], np.ndarray]:
    symbols = tuple(symbols) if symbols is not None else hamiltonian_symbols(n)
    H = sp.sympify(H, locals={str(s): s for s in symbols})
    grad = sp.lambdify([symbols], [sp.diff(H, s) for s in symbols], "numpy")
    J = j_map(n).astype(float)

    def field(x: np.ndarray) -> np.ndarray:
        return J @ np.asarray(grad(x), dtype=float)

    return field


def rk4_flow(
    H: Union[str, sp.Expr],
    n: int,
    x0: Sequence[float],
    t: float,
    steps: int = 1000,
    symbols: Optional[Sequence[sp.Symbol]] = None,
) -> np.ndarray:
    """Classical fourth-order Runge-Kutta integration of Hamilton's equations."""

    if steps < 1:
        raise InvalidInputError("steps must be positive")
    field = hamiltonian_vector_field(H, n, symbols)
    x = np.asarray(x0, dtype=float).copy()
    h = t / steps
    for _ in range(steps):
        k1 = field(x)
        k2 = field(x + 0.5 * h * k1)
        k3 = field(x + 0.5 * h * k2)
        k4 = field(x + h * k3)
        x = x + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return x


def is_flow_affine(H: Union[str, sp.Expr], symbols: Sequence[sp.Symbol]) -> bool:
    """True iff ``H`` is a polynomial of degree at most two in ``symbols``."""

    symbols = tuple(symbols)
    expr = sp.sympify(H, locals={str(s): s for s in symbols})
    if not expr.is_polynomial(*symbols):
        return False
    if expr == 0:
        return True
    return sp.Poly(expr, *symbols).total_degree() <= 2


def affinity_defect(
    H: Union[str, sp.Expr],
    n: int,
    a: Sequence[float],
    b: Sequence[float],
    t: float = 1.0,
    steps: int = 1000,
) -> float:
    """Distance of the integrated flow map from midpoint-preserving on ``a, (a+b)/2, b``."""

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ends = [rk4_flow(H, n, x, t, steps) for x in (a, b)]
    middle = rk4_flow(H, n, 0.5 * (a + b), t, steps)
    return float(np.linalg.norm(middle - 0.5 * (ends[0] + ends[1])))


@dataclass(frozen=True)
class DarbouxDiagonalization:
    """Symplectic ``T`` with ``T^T A T = diag(a_1..a_n, b_1..b_n)``."""

    transform: np.ndarray
    a: np.ndarray
    b: np.ndarray
    symplectic_residual: float
    diagonal_residual: float

    @property
    def diagonal(self) -> tuple[float, ...]:
        """``(a_1, b_1, .., a_n, b_n)``."""

        return tuple(float(v) for pair in zip(self.a, self.b) for v in pair)

    @property
    def elliptic(self) -> tuple[bool, ...]:
        return tuple(bool(x * y > 0) for x, y in zip(self.a, self.b))


def _symmetric_float(A: Any) -> np.ndarray:
    A = np.atleast_2d(linalg.as_float_array(A))
    if A.shape[0] != A.shape[1] or A.shape[0] % 2:
        raise InvalidInputError(f"A must be square of even size, got {A.shape}")
    if not linalg.is_symmetric(A):
        raise InvalidInputError("A must be symmetric")
    return A


def _eigen_pairs(K: np.ndarray, tol: float) -> list[tuple[str, complex, np.ndarray, Optional[np.ndarray]]]:
    """Group the spectrum of a generic Hamiltonian matrix into ``+-lambda`` pairs."""

    values, vectors = np.linalg.eig(K)
    scale = max(1.0, float(np.max(np.abs(values))))
    gaps = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(gaps, np.inf)
    if np.min(gaps) <= tol * scale:
        raise NonGenericInputError("JA has a repeated eigenvalue")
    if np.min(np.abs(values)) <= tol * scale:
        raise NonGenericInputError("JA has a zero eigenvalue")
    pairs = []
    for index, value in enumerate(values):
        real, imag = abs(value.real) > tol * scale, abs(value.imag) > tol * scale
        if real and imag:
            raise NonGenericInputError(f"JA has a complex quadruplet eigenvalue {value:.6g}")
        if real and value.real > 0:
            partner = int(np.argmin(np.abs(values + value)))
            pairs.append(("hyperbolic", value, vectors[:, index].real, vectors[:, partner].real))
        elif imag and value.imag > 0:
            pairs.append(("elliptic", value, vectors[:, index], None))
    logger.debug("spectrum of JA: %s", np.round(values, 10))
    return pairs


def _pair_basis(kind: str, J: np.ndarray, first: np.ndarray, second: Optional[np.ndarray]) -> np.ndarray:
    if kind == "hyperbolic":
        u, w = first, second
        c = u @ J @ w
        if abs(c) < GENERICITY_TOL:
            raise NonGenericInputError("degenerate hyperbolic eigenpair")
        w = w / c
        return np.column_stack([(u + w) / np.sqrt(2), (w - u) / np.sqrt(2)])
    x, y = first.real, first.imag
    c = x @ J @ y
    if abs(c) < GENERICITY_TOL:
        raise NonGenericInputError("degenerate elliptic eigenvector")
    root = np.sqrt(abs(c))
    return np.column_stack([x, y] if c > 0 else [y, x]) / root


def _align(kind: str, X: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Move a Darboux pair within its stabilizer as close as possible to the axes ``E``."""

    G = np.linalg.lstsq(X, E, rcond=None)[0]
    if kind == "elliptic":
        s = float(np.hypot(G[0, 0], G[1, 0]))
        if s < GENERICITY_TOL:
            return X
        cos, sin = G[0, 0] / s, G[1, 0] / s
        return X @ np.array([[s * cos, -sin / s], [s * sin, cos / s]])
    if abs(G[0, 0]) < GENERICITY_TOL or abs(G[1, 1]) < GENERICITY_TOL:
        return X
    s = np.sqrt(abs(G[0, 0] / G[1, 1]))
    return np.sign(G[0, 0]) * X @ np.diag([s, 1 / s])


def darboux_diagonalize(A: Any, tol: float = GENERICITY_TOL) -> DarbouxDiagonalization:
    """Symplectic change of basis putting a generic quadratic form into ``sum a_j q_j^2 + b_j p_j^2``.

    Every eigenvalue pair of ``JA`` must be simple, nonzero and either real or
    purely imaginary; anything else raises :class:`NonGenericInputError`.
    Each Darboux pair is aligned with the coordinate pair it overlaps most, so
    an already diagonal ``A`` comes back with ``T = I``.
    """

    A = _symmetric_float(A)
    n = A.shape[0] // 2
    J = j_map(n).astype(float)
    pairs = _eigen_pairs(J @ A, tol)
    if len(pairs) != n:
        raise NonGenericInputError("eigenvalues of JA do not split into n pairs")
    bases = [_pair_basis(kind, J, first, second) for kind, _, first, second in pairs]
    overlap = np.array([[np.linalg.norm(X[[k, n + k], :]) for k in range(n)] for X in bases])
    rows, cols = linear_sum_assignment(-overlap)
    T = np.zeros((2 * n, 2 * n))
    for row, k in zip(rows, cols):
        E = np.zeros((2 * n, 2))
        E[k, 0] = E[n + k, 1] = 1.0
        X = _align(pairs[row][0], bases[row], E)
        T[:, k], T[:, n + k] = X[:, 0], X[:, 1]
    D = T.T @ A @ T
    a, b = np.diag(D)[:n].copy(), np.diag(D)[n:].copy()
    symplectic_residual = float(np.max(np.abs(T.T @ J @ T - J)))
    diagonal_residual = float(np.max(np.abs(D - np.diag(np.diag(D)))))
    scale = max(1.0, float(np.max(np.abs(A))))
    if symplectic_residual > 1e-9 * max(1.0, float(np.max(np.abs(T))) ** 2) or diagonal_residual > 1e-9 * scale:
        raise NonGenericInputError(
            f"ill-conditioned diagonalization (symplectic {symplectic_residual:.2e}, diagonal {diagonal_residual:.2e})"
        )
    return DarbouxDiagonalization(T, a, b, symplectic_residual, diagonal_residual)


def commuting_family(A: Any, xi: Any, c: Any = 0.0) -> list[QuadraticHamiltonian]:
    """The constant ``1`` followed by ``h_j = (A_j, A_j A^-1 xi, 0)``, one per Darboux pair.

    The ``A_j`` are the pieces of ``A`` supported on a single Darboux pair, so
    all the ``h_j`` Poisson commute and ``c + sum_j h_j`` is ``(A, xi, c)``.
    """

    A = _symmetric_float(A)
    n = A.shape[0] // 2
    xi = np.asarray(linalg.as_float_array(xi), dtype=float)
    if xi.shape != (2 * n,):
        raise InvalidInputError(f"xi must have length {2 * n}")
    if np.linalg.cond(A) > 1 / GENERICITY_TOL:
        raise NonGenericInputError("A is singular")
    diag = darboux_diagonalize(A)
    T_inv = np.linalg.inv(diag.transform)
    A_inv_xi = np.linalg.solve(A, xi)
    family = [QuadraticHamiltonian.constant(n, 1.0)]
    for k in range(n):
        D = np.zeros((2 * n, 2 * n))
        D[k, k], D[n + k, n + k] = diag.a[k], diag.b[k]
        A_k = T_inv.T @ D @ T_inv
        A_k = 0.5 * (A_k + A_k.T)
        family.append(QuadraticHamiltonian(A_k, A_k @ A_inv_xi, 0.0))
    residual = QuadraticHamiltonian(A, xi, float(c)).max_abs_difference(
        sum(family[1:], QuadraticHamiltonian.constant(n, float(c)))
    )
    logger.debug("commuting family reconstruction residual %.3e", residual)
    return family


class CurveKind(str, Enum):
    ELLIPSE = "ellipse"
    HYPERBOLA = "hyperbola"
    PARABOLA = "parabola"
    LINE = "line"


@dataclass(frozen=True)
class HomogeneousCurve:
    """Orbit ``t -> x0 + exp(tM)(0, 0, 1)`` with ``M = [[A, B, 1], [C, -A, 0], [0, 0, 0]]``."""

    A: Any
    B: Any
    C: Any
    x0: np.ndarray
    kind: CurveKind
    det: Any
    normalized_det: int

    @property
    def M(self) -> np.ndarray:
        return np.array([[self.A, self.B, 1], [self.C, -self.A, 0], [0, 0, 0]], dtype=float)

    @property
    def scale(self) -> float:
        """Factor ``s`` so that ``M / s`` has block determinant in ``{-1, 0, 1}``."""

        return float(np.sqrt(abs(float(self.det)))) if self.normalized_det else 1.0

    @property
    def period(self) -> Optional[float]:
        return 2 * np.pi / self.scale if self.kind is CurveKind.ELLIPSE else None

    def point(self, t: float) -> np.ndarray:
        return self.x0 + expm(t * self.M)[:2, 2]

    def sample(self, ts: Sequence[float]) -> np.ndarray:
        return np.array([self.point(t) for t in ts])


def homogeneous_curve(A: Any, B: Any, C: Any, x0: Sequence[float] = (0.0, 0.0)) -> HomogeneousCurve:
    """Homogeneous Lagrangian curve in the affine symplectic plane.

    ``C = 0`` gives a line; otherwise the sign of the block determinant
    ``-A^2 - BC`` selects ellipse, hyperbola or parabola.
    """

    exact = all(is_exact_scalar(v) for v in (A, B, C))
    A, B, C = (as_fraction(v) if exact else float(v) for v in (A, B, C))
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (2,):
        raise InvalidInputError("x0 must be a point of the plane")
    det = -A * A - B * C
    zero_tol = 0 if exact else 1e-12 * max(1.0, A * A, abs(B * C))
    sign = 0 if abs(det) <= zero_tol else (1 if det > 0 else -1)
    if C == 0:
        kind = CurveKind.LINE
    else:
        kind = {1: CurveKind.ELLIPSE, -1: CurveKind.HYPERBOLA, 0: CurveKind.PARABOLA}[sign]
    return HomogeneousCurve(A, B, C, x0, kind, det, sign)


def unused_variables(C: SymTensor) -> np.ndarray:
    """Basis (as columns) of ``{w : C(w, ., .) = 0}``: the ruling directions."""

    if C.order != 3:
        raise InvalidInputError("unused_variables expects an order-3 tensor")
    return unused_directions(depolarize(C))


def lagrangian_grassmannian_dims(k: int, n: int) -> tuple[int, int]:
    """Dimensions of the isotropic ``k``-planes in ``R^2n`` and of their affine translates."""

    if not 1 <= k <= n:
        raise InvalidInputError(f"need 1 <= k <= n, got k={k}, n={n}")
    linear = k * (4 * n - 3 * k + 1) // 2
    return linear, linear + 2 * n - k


@dataclass(frozen=True)
class AffineSymplecticElement:
    """Symplectic frame ``(u_1..u_n, v^1..v^n)`` based at the point ``x``."""

    u: np.ndarray
    v: np.ndarray
    x: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        x = np.asarray(self.x, dtype=float)
        n = u.shape[1] if u.ndim == 2 else 0
        if n < 1 or u.shape != (2 * n, n) or v.shape != (2 * n, n) or x.shape != (2 * n,):
            raise InvalidInputError(f"bad frame shapes u{u.shape} v{v.shape} x{x.shape}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "x", x)
        scale = max(1.0, float(np.max(np.abs(np.hstack([u, v])))) ** 2)
        if self.frame_residual() > FRAME_TOL * scale:
            raise InvalidInputError(f"not a symplectic frame (residual {self.frame_residual():.3e})")

    @property
    def n(self) -> int:
        return self.u.shape[1]

    @classmethod
    def identity(cls, n: int) -> "AffineSymplecticElement":
        eye = np.eye(2 * n)
        return cls(eye[:, :n], eye[:, n:], np.zeros(2 * n))

    @classmethod
    def from_matrix(cls, g: np.ndarray) -> "AffineSymplecticElement":
        g = np.asarray(g, dtype=float)
        size = g.shape[0]
        if g.shape != (size, size) or size % 2 == 0:
            raise InvalidInputError(f"affine matrix must be (2n+1)-square, got {g.shape}")
        if not np.allclose(g[-1], np.eye(size)[-1]):
            raise InvalidInputError("last row of an affine matrix must be (0, .., 0, 1)")
        n = (size - 1) // 2
        return cls(g[: 2 * n, :n], g[: 2 * n, n : 2 * n], g[: 2 * n, 2 * n])

    def matrix(self) -> np.ndarray:
        n = self.n
        g = np.eye(2 * n + 1)
        g[: 2 * n, :n] = self.u
        g[: 2 * n, n : 2 * n] = self.v
        g[: 2 * n, 2 * n] = self.x
        return g

    def frame_residual(self) -> float:
        """Largest deviation of ``Omega`` on the frame from the Darboux values."""

        J = j_map(self.n).astype(float)
        parts = [self.u.T @ J @ self.u, self.v.T @ J @ self.v, self.u.T @ J @ self.v - np.eye(self.n)]
        return max(float(np.max(np.abs(part))) for part in parts)

    def __matmul__(self, other: "AffineSymplecticElement") -> "AffineSymplecticElement":
        if other.n != self.n:
            raise InvalidInputError("dimension mismatch")
        return AffineSymplecticElement.from_matrix(self.matrix() @ other.matrix())

    def inverse(self) -> "AffineSymplecticElement":
        n = self.n
        J = j_map(n).astype(float)
        L = np.hstack([self.u, self.v])
        L_inv = -J @ L.T @ J
        g = np.eye(2 * n + 1)
        g[: 2 * n, : 2 * n] = L_inv
        g[: 2 * n, 2 * n] = -L_inv @ self.x
        return AffineSymplecticElement.from_matrix(g)

    def apply(self, point: Sequence[float]) -> np.ndarray:
        L = np.hstack([self.u, self.v])
        return L @ np.asarray(point, dtype=float) + self.x


def stabilizer_element(a: Any, b: Any) -> AffineSymplecticElement:
    """Element ``[[a, a b, 0], [0, a^-T, 0], [0, 0, 1]]`` fixing the origin and the ``q``-plane.

    ``a`` is any invertible ``n x n`` matrix and ``b`` a symmetric one.
    """

    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n, n):
        raise InvalidInputError("a and b must be n x n")
    if not linalg.is_symmetric(b):
        raise InvalidInputError("b must be symmetric")
    a_inv_t = linalg.inverse(a).T
    u = np.vstack([a, np.zeros((n, n))])
    v = np.vstack([a @ b, a_inv_t])
    return AffineSymplecticElement(u, v, np.zeros(2 * n))


def flow_element(f: QuadraticHamiltonian, t: float) -> AffineSymplecticElement:
    """The time-``t`` flow of ``f`` as an affine symplectic element."""

    return AffineSymplecticElement.from_matrix(flow_matrix(f, t))


def random_hamiltonian(
    n: int, rng: Optional[np.random.Generator] = None, *, scale: float = 1.0, seed: Optional[int] = None
) -> QuadraticHamiltonian:
    """Gaussian symmetric ``A``, Gaussian ``xi`` and ``c``."""

    rng = rng if rng is not None else make_rng(seed)
    M = rng.normal(scale=scale, size=(2 * n, 2 * n))
    return QuadraticHamiltonian(0.5 * (M + M.T), rng.normal(scale=scale, size=2 * n), float(rng.normal(scale=scale)))
