"""Generating-function jets of Lagrangian submanifolds.

A Lagrangian patch is the graph ``p = S'(q)`` of the gradient of a generating
function ``S``.  Value, gradient and Hessian of ``S`` at the base point only
record translation and shear, so a :class:`GeneratingJet` keeps the third and
fourth derivatives: the cubic invariant ``S_ijk`` and its covariant
derivative ``DS_ijkl``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
import logging
from typing import Any, Callable, Mapping, Optional, Sequence, Union

import numpy as np
import sympy as sp

from . import linalg
from .errors import InvalidInputError
from .forms import (
    HomogeneousForm,
    LinearTransform,
    SymTensor,
    depolarize,
    polarize,
    transform_tensor,
)
from .utils import as_fraction, is_exact_scalar, to_sympy_scalar

logger = logging.getLogger(__name__)

Loop = Callable[[float], Sequence[float]]

CLOSURE_TOL = 1e-9


def patch_symbols(n: int) -> tuple[sp.Symbol, ...]:
    return tuple(sp.symbols(f"q1:{n + 1}"))


@dataclass(frozen=True)
class LagrangianPatch:
    """The graph ``{(q, S'(q))}`` of a generating function ``S(q1, .., qn)``."""

    dim: int
    expr: sp.Expr
    name: str = "patch"
    domain: Optional[Callable[[Sequence[float]], bool]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidInputError("patch dimension must be positive")
        expr = sp.sympify(self.expr)
        allowed = set(self.symbols)
        stray = expr.free_symbols - allowed
        if stray:
            raise InvalidInputError(f"generating function uses unknown symbols {sorted(map(str, stray))}")
        object.__setattr__(self, "expr", expr)

    @property
    def symbols(self) -> tuple[sp.Symbol, ...]:
        return patch_symbols(self.dim)

    @classmethod
    def from_polynomial(
        cls, dim: int, terms: Mapping[Sequence[int], Any], name: str = "polynomial"
    ) -> "LagrangianPatch":
        q = patch_symbols(dim)
        expr = sp.Add(
            *[
                to_sympy_scalar(as_fraction(c) if not isinstance(c, float) else c)
                * sp.Mul(*[s**e for s, e in zip(q, exp)])
                for exp, c in terms.items()
            ]
        )
        return cls(dim, expr, name)

    @classmethod
    def from_form(cls, F: HomogeneousForm, name: str = "form") -> "LagrangianPatch":
        return cls(F.dim, F.to_sympy(patch_symbols(F.dim)), name)

    @classmethod
    def from_expression(cls, text: str, dim: int, name: str = "expression") -> "LagrangianPatch":
        q = patch_symbols(dim)
        expr = sp.sympify(text, locals={s.name: s for s in q}, rational=True)
        return cls(dim, expr, name)

    def contains(self, q0: Sequence[Any]) -> bool:
        return self.domain is None or bool(self.domain([float(v) for v in q0]))

    def momentum(self, q0: Sequence[Any]) -> np.ndarray:
        """``p = S'(q0)`` as floats."""

        subs = _substitution(self.symbols, q0)
        return np.array([float(sp.N(sp.diff(self.expr, s).subs(subs))) for s in self.symbols])

    def hessian(self, q0: Sequence[Any]) -> np.ndarray:
        subs = _substitution(self.symbols, q0)
        return np.array(
            [[float(sp.N(sp.diff(self.expr, a, b).subs(subs))) for b in self.symbols] for a in self.symbols]
        )

    def is_lagrangian(self, points: Sequence[Sequence[Any]], tol: float = 1e-10) -> bool:
        """Check that the symplectic form vanishes on the coordinate tangent pairs."""

        n = self.dim
        for q0 in points:
            hess = self.hessian(q0)
            for a in range(n):
                for b in range(a + 1, n):
                    # tangent vectors (e_a, S'' e_a) and (e_b, S'' e_b)
                    omega = hess[a, b] - hess[b, a]
                    if abs(omega) > tol * max(1.0, float(np.max(np.abs(hess)))):
                        return False
        return True


@dataclass(frozen=True)
class GeneratingJet:
    """Third and fourth order Taylor data of a normalized generating function."""

    dim: int
    S3: SymTensor
    S4: SymTensor
    base_point: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.S3.dim != self.dim or self.S3.order != 3:
            raise InvalidInputError("S3 must be an order-3 tensor of the jet dimension")
        if self.S4.dim != self.dim or self.S4.order != 4:
            raise InvalidInputError("S4 must be an order-4 tensor of the jet dimension")

    @property
    def is_exact(self) -> bool:
        return self.S3.is_exact and self.S4.is_exact

    @classmethod
    def from_cubic(cls, F: HomogeneousForm, S4: Optional[SymTensor] = None) -> "GeneratingJet":
        if F.degree != 3:
            raise InvalidInputError("a jet is built from a cubic form")
        quartic = S4 if S4 is not None else SymTensor.zeros(F.dim, 4, exact=F.is_exact)
        return cls(F.dim, polarize(F), quartic)


def _substitution(symbols: Sequence[sp.Symbol], q0: Sequence[Any]) -> dict[sp.Symbol, sp.Expr]:
    if len(q0) != len(symbols):
        raise InvalidInputError(f"point has length {len(q0)}, patch has dim {len(symbols)}")
    return {s: to_sympy_scalar(as_fraction(v) if is_exact_scalar(v) else float(v)) for s, v in zip(symbols, q0)}


def _lift(values: dict[tuple[int, ...], sp.Expr], n: int, order: int) -> SymTensor:
    """Fill a symmetric tensor from values on sorted index tuples."""

    simplified = {k: sp.sympify(v) for k, v in values.items()}
    exact = all(v.is_Rational for v in simplified.values())
    out = linalg.zeros_like_mode((n,) * order, exact)
    for key, value in simplified.items():
        scalar = as_fraction(value) if exact else float(sp.re(sp.N(value)))
        for perm in set(permutations(key)):
            out[perm] = scalar
    return SymTensor(n, order, out)


def jet_from_patch(L: LagrangianPatch, q0: Sequence[Any]) -> GeneratingJet:
    """Third and fourth derivatives of ``S`` at ``q0``.

    Exact rational output when ``S`` and ``q0`` are rational, floats otherwise.
    """

    if not L.contains(q0):
        raise InvalidInputError(f"point {list(q0)} is outside the domain of {L.name}")
    q = L.symbols
    subs = _substitution(q, q0)
    cache: dict[tuple[int, ...], sp.Expr] = {(): L.expr}

    def derivative(index: tuple[int, ...]) -> sp.Expr:
        if index not in cache:
            cache[index] = sp.diff(derivative(index[:-1]), q[index[-1]])
        return cache[index]

    third = {idx: derivative(idx).subs(subs) for idx in combinations_with_replacement(range(L.dim), 3)}
    fourth = {idx: derivative(idx).subs(subs) for idx in combinations_with_replacement(range(L.dim), 4)}
    base = tuple(float(v) for v in q0) + tuple(float(v) for v in L.momentum(q0))
    return GeneratingJet(L.dim, _lift(third, L.dim, 3), _lift(fourth, L.dim, 4), base)


def finite_difference_S3(
    L: LagrangianPatch, q0: Sequence[float], step: float = 1e-3, levels: int = 4
) -> np.ndarray:
    """Richardson-extrapolated central differences of the gradient of ``S``."""

    n = L.dim
    grad = sp.lambdify([L.symbols], [sp.diff(L.expr, s) for s in L.symbols], "numpy")
    x0 = np.asarray(q0, dtype=float)
    eye = np.eye(n)

    def second_difference(h: float) -> np.ndarray:
        out = np.zeros((n, n, n))
        for j in range(n):
            for k in range(n):
                pp = np.asarray(grad(x0 + h * eye[j] + h * eye[k]), dtype=float)
                pm = np.asarray(grad(x0 + h * eye[j] - h * eye[k]), dtype=float)
                mp = np.asarray(grad(x0 - h * eye[j] + h * eye[k]), dtype=float)
                mm = np.asarray(grad(x0 - h * eye[j] - h * eye[k]), dtype=float)
                out[:, j, k] = (pp - pm - mp + mm) / (4 * h * h)
        return out

    table = [second_difference(step / 2**level) for level in range(levels)]
    for m in range(1, levels):
        factor = 4**m
        table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
    return table[0]


def cubic_invariant(j: GeneratingJet) -> HomogeneousForm:
    """The cubic form ``(1/6) S_ijk q^i q^j q^k``."""

    return depolarize(j.S3)


def _shear_correction(S3: np.ndarray, B: np.ndarray) -> np.ndarray:
    contracted = np.tensordot(np.tensordot(S3, B, axes=([2], [0])), S3, axes=([2], [0]))
    return contracted + contracted.transpose(0, 2, 1, 3) + contracted.transpose(0, 2, 3, 1)


def _check_symmetric_matrix(B: Any, n: int) -> np.ndarray:
    raw = np.asarray(B)
    matrix = linalg.coerce_array(raw) if raw.dtype == object or raw.dtype.kind in "iu" else raw.astype(float)
    if matrix.shape != (n, n):
        raise InvalidInputError(f"matrix must be {n}x{n}")
    if not linalg.is_symmetric(matrix):
        raise InvalidInputError("matrix must be symmetric")
    return matrix


def apply_shear(j: GeneratingJet, B: Any) -> GeneratingJet:
    """Jet of ``T`` defined by ``T'(Q) = S'(Q - B T'(Q))``.

    The cubic part is unchanged; the quartic part picks up
    ``-(S_ijk B^km S_mab + S_iak B^km S_mjb + S_ibk B^km S_mja)``.
    """

    B = _check_symmetric_matrix(B, j.dim)
    exact = j.is_exact and linalg.is_exact_array(B)
    S3 = j.S3.entries if exact else linalg.as_float_array(j.S3.entries)
    S4 = j.S4.entries if exact else linalg.as_float_array(j.S4.entries)
    Bm = B if exact else linalg.as_float_array(B)
    corrected = S4 - _shear_correction(S3, Bm)
    return GeneratingJet(j.dim, SymTensor(j.dim, 3, S3), SymTensor(j.dim, 4, corrected), j.base_point)


def shear_by_series(j: GeneratingJet, B: Any) -> GeneratingJet:
    """Solve ``T'(Q) = S'(Q - B T'(Q))`` as a power series to order 3 in ``T'``."""

    n = j.dim
    B = _check_symmetric_matrix(B, n)
    Q = patch_symbols(n)
    S = (
        depolarize(j.S3).to_sympy(Q)
        + depolarize(j.S4).to_sympy(Q)
    )
    grad = [sp.diff(S, s) for s in Q]
    Bs = linalg.to_sympy_matrix(B)

    def truncate(expr: sp.Expr) -> sp.Expr:
        poly = sp.Poly(sp.expand(expr), *Q)
        return sp.Add(*[c * sp.Mul(*[s**e for s, e in zip(Q, m)]) for m, c in poly.terms() if sum(m) <= 3])

    P = [truncate(g) for g in grad]
    for _ in range(2):
        shifted = [Q[i] - sum(Bs[i, k] * P[k] for k in range(n)) for i in range(n)]
        P = [truncate(g.subs(dict(zip(Q, shifted)), simultaneous=True)) for g in grad]
    origin = {s: 0 for s in Q}
    third = {idx: sp.diff(P[idx[0]], Q[idx[1]], Q[idx[2]]).subs(origin) for idx in combinations_with_replacement(range(n), 3)}
    fourth = {
        idx: sp.diff(P[idx[0]], Q[idx[1]], Q[idx[2]], Q[idx[3]]).subs(origin)
        for idx in combinations_with_replacement(range(n), 4)
    }
    return GeneratingJet(n, _lift(third, n, 3), _lift(fourth, n, 4), j.base_point)


def apply_gl(j: GeneratingJet, A: LinearTransform) -> GeneratingJet:
    """Jet of ``S(A^-1 q)``."""

    if A.dim != j.dim:
        raise InvalidInputError(f"transform has dim {A.dim}, jet has dim {j.dim}")
    inverse = A.inverse().matrix
    return GeneratingJet(
        j.dim,
        transform_tensor(j.S3, inverse),
        transform_tensor(j.S4, inverse),
        j.base_point,
    )


def clifford_torus_patch(radii: Sequence[Any]) -> LagrangianPatch:
    """Product of circles ``q_i^2 + p_i^2 = r_i^2`` on the branch ``p_i > 0``."""

    if not radii or any(float(r) <= 0 for r in radii):
        raise InvalidInputError("Clifford torus radii must be positive")
    n = len(radii)
    q = patch_symbols(n)
    expr = sp.Integer(0)
    for qi, r in zip(q, radii):
        rs = to_sympy_scalar(as_fraction(r) if is_exact_scalar(r) else float(r))
        expr += _circle_branch(qi, rs)
    bounds = [float(r) for r in radii]
    return LagrangianPatch(
        n,
        expr,
        "clifford",
        domain=lambda point: all(abs(x) < r for x, r in zip(point, bounds)),
    )


def _circle_branch(qi: sp.Symbol, radius: sp.Expr) -> sp.Expr:
    u = qi / radius
    return radius**2 / 2 * (sp.asin(u) + u * sp.sqrt(1 - u**2))


def clifford_torus_jet(radii: Sequence[Any], n: Optional[int] = None) -> GeneratingJet:
    """Jet at ``q = 0``; the cubic term is ``-(1/6) sum q_i^3 / r_i``."""

    if n is not None and n != len(radii):
        raise InvalidInputError("number of radii must equal n")
    patch = clifford_torus_patch(radii)
    return jet_from_patch(patch, [Fraction(0)] * patch.dim)


def singular_example_patch(kind: int, params: tuple[Any, Any], n: int) -> LagrangianPatch:
    """Generating functions of the two immersed ``S^1 x S^{n-1}`` examples.

    Kind 1 is ``(1/3)(R^2-|q|^2)^{3/2}(|q|^2-r^2)^{3/2}`` on ``r < |q| < R``.
    Kind 2 is a circle of radius ``R`` in the ``(q1, p1)`` plane times the graph
    of ``f(q') = (1/3)(1-|q'|^2)`` on ``|q'| < 1``.
    """

    R, r = (to_sympy_scalar(as_fraction(v) if is_exact_scalar(v) else float(v)) for v in params)
    if n < 2:
        raise InvalidInputError("singular examples need n >= 2")
    q = patch_symbols(n)
    outer, inner = float(R), float(r)
    if kind == 1:
        if not 0 <= inner < outer:
            raise InvalidInputError("kind 1 needs 0 <= r < R")
        rho2 = sum(s**2 for s in q)
        expr = sp.Rational(1, 3) * (R**2 - rho2) ** sp.Rational(3, 2) * (rho2 - r**2) ** sp.Rational(3, 2)
        return LagrangianPatch(
            n,
            expr,
            "singular1",
            domain=lambda point: inner < float(np.linalg.norm(point)) < outer,
        )
    if kind == 2:
        if outer <= 0:
            raise InvalidInputError("kind 2 needs R > 0")
        rest = sum(s**2 for s in q[1:])
        expr = _circle_branch(q[0], R) + sp.Rational(1, 3) * (1 - rest)
        return LagrangianPatch(
            n,
            expr,
            "singular2",
            domain=lambda point: float(np.linalg.norm(point)) < 1.0 and abs(point[0]) < outer,
        )
    raise InvalidInputError(f"unknown singular example kind {kind}")


def singular_example_jet(kind: int, params: tuple[Any, Any], q0: Sequence[Any]) -> GeneratingJet:
    patch = singular_example_patch(kind, params, len(q0))
    return jet_from_patch(patch, q0)


def circle_loop(radius: float = 1.0) -> Loop:
    """``q = r cos 2 pi t``, ``p = r sin 2 pi t`` in the plane."""

    def loop(t: float) -> np.ndarray:
        angle = 2 * np.pi * t
        return np.array([radius * np.cos(angle), radius * np.sin(angle)])

    return loop


def example1_loop(R: float, r: float, n: int = 2, direction: Optional[Sequence[float]] = None) -> Loop:
    """The ``S^1`` cycle of singular example 1: out along a ray on one sheet, back on the other."""

    if not 0 <= r < R:
        raise InvalidInputError("example 1 loop needs 0 <= r < R")
    e = np.zeros(n)
    e[0] = 1.0
    if direction is not None:
        e = np.asarray(direction, dtype=float)
        e = e / np.linalg.norm(e)

    def loop(t: float) -> np.ndarray:
        t = t % 1.0
        rho = (R + r) / 2 - (R - r) / 2 * np.cos(2 * np.pi * t)
        # signed square roots keep the sheet switch smooth at rho = R
        outer = np.sqrt(R - r) * np.cos(np.pi * t) * np.sqrt(R + rho)
        inner = np.sqrt(R - r) * np.sin(np.pi * t) * np.sqrt(rho + r)
        dS = rho * outer * inner * (R**2 + r**2 - 2 * rho**2)
        return np.concatenate([rho * e, dS * e])

    return loop


def example2_loop(R: float, q_rest: Sequence[float]) -> Loop:
    """The ``S^1`` cycle of singular example 2: the circle factor at fixed ``q'``."""

    rest = np.asarray(q_rest, dtype=float)
    p_rest = -2.0 / 3.0 * rest

    def loop(t: float) -> np.ndarray:
        angle = 2 * np.pi * t
        q = np.concatenate([[R * np.cos(angle)], rest])
        p = np.concatenate([[R * np.sin(angle)], p_rest])
        return np.concatenate([q, p])

    return loop


def action_integral(loop: Union[Loop, np.ndarray], n_samples: int = 4096) -> float:
    """``oint p dq`` over a closed curve in ``R^{2n}`` with coordinates ``(q, p)``.

    A callable is sampled on ``t = k / n_samples`` and integrated with spectral
    differentiation and the periodic trapezoid rule; an array of samples is
    integrated with the trapezoid rule on its polygon.
    """

    if callable(loop):
        start = np.asarray(loop(0.0), dtype=float)
        end = np.asarray(loop(1.0), dtype=float)
        scale = max(1.0, float(np.max(np.abs(start))))
        if np.max(np.abs(start - end)) > CLOSURE_TOL * scale:
            raise InvalidInputError("loop is not closed")
        ts = np.arange(n_samples) / n_samples
        points = np.array([np.asarray(loop(t), dtype=float) for t in ts])
        n = points.shape[1] // 2
        q, p = points[:, :n], points[:, n:]
        freqs = np.fft.fftfreq(n_samples, d=1.0 / n_samples)
        spectrum = np.fft.fft(q, axis=0)
        if n_samples % 2 == 0:
            # the Nyquist mode has no well-defined derivative
            spectrum[n_samples // 2] = 0
        dq = np.real(np.fft.ifft(2j * np.pi * freqs[:, None] * spectrum, axis=0))
        return float(np.sum(p * dq) / n_samples)

    points = np.asarray(loop, dtype=float)
    if points.ndim != 2 or points.shape[1] % 2:
        raise InvalidInputError("loop samples must be an array of shape (k, 2n)")
    scale = max(1.0, float(np.max(np.abs(points))))
    if np.max(np.abs(points[0] - points[-1])) > CLOSURE_TOL * scale:
        raise InvalidInputError("loop is not closed")
    n = points.shape[1] // 2
    q, p = points[:, :n], points[:, n:]
    return float(np.sum(0.5 * (p[1:] + p[:-1]) * (q[1:] - q[:-1])))


@dataclass(frozen=True)
class MaurerCartanSample:
    """Coefficients of ``g^-1 dg`` in ``dq^k`` for the section ``g(q)``.

    ``alpha``, ``beta``, ``gamma`` have shape ``(n, n, n)`` and ``omega``, ``eta``
    have shape ``(n, n)``; the last index is always the ``dq^k`` slot.
    """

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    omega: np.ndarray
    eta: np.ndarray

    def max_residual(self, S3: Optional[SymTensor] = None) -> float:
        """Largest deviation from ``alpha = beta = eta = 0``, ``omega = dq`` and ``gamma = S3``."""

        n = self.omega.shape[0]
        parts = [self.alpha, self.beta, self.eta, self.omega - np.eye(n)]
        if S3 is not None:
            parts.append(self.gamma - S3.entries)
        return max(float(np.max(np.abs(linalg.as_float_array(part)), initial=0.0)) for part in parts)


def section_matrix(L: LagrangianPatch) -> sp.Matrix:
    """``g(q) = [[I, 0, q], [S'', I, S'], [0, 0, 1]]`` with columns ``u_j``, ``v^j``, ``x``."""

    n = L.dim
    q = L.symbols
    hess = sp.hessian(L.expr, q)
    grad = sp.Matrix([sp.diff(L.expr, s) for s in q])
    g = sp.zeros(2 * n + 1, 2 * n + 1)
    g[:n, :n] = sp.eye(n)
    g[n : 2 * n, :n] = hess
    g[n : 2 * n, n : 2 * n] = sp.eye(n)
    g[:n, 2 * n] = sp.Matrix(q)
    g[n : 2 * n, 2 * n] = grad
    g[2 * n, 2 * n] = 1
    return g


def frame_check(L: LagrangianPatch, q0: Sequence[Any]) -> MaurerCartanSample:
    """Maurer-Cartan form of the explicit section of the affine symplectic frame bundle."""

    if not L.contains(q0):
        raise InvalidInputError(f"point {list(q0)} is outside the domain of {L.name}")
    n = L.dim
    q = L.symbols
    subs = _substitution(q, q0)
    g = section_matrix(L)
    g_inv = g.subs(subs).inv()
    blocks: dict[str, dict[tuple[int, ...], sp.Expr]] = {"alpha": {}, "beta": {}, "gamma": {}, "eta": {}, "omega": {}}
    for k, s in enumerate(q):
        mc = (g_inv * sp.diff(g, s).subs(subs)).applyfunc(sp.simplify)
        for i in range(n):
            blocks["omega"][(i, k)] = mc[i, 2 * n]
            blocks["eta"][(i, k)] = mc[n + i, 2 * n]
            for j in range(n):
                blocks["alpha"][(i, j, k)] = mc[i, j]
                blocks["beta"][(i, j, k)] = mc[i, n + j]
                blocks["gamma"][(i, j, k)] = mc[n + i, j]
    arrays = {}
    for name, values in blocks.items():
        exact = all(v.is_Rational for v in values.values())
        shape = (n, n) if name in ("omega", "eta") else (n, n, n)
        out = linalg.zeros_like_mode(shape, exact)
        for index, value in values.items():
            out[index] = as_fraction(value) if exact else float(sp.N(value))
        arrays[name] = out
    return MaurerCartanSample(arrays["alpha"], arrays["beta"], arrays["gamma"], arrays["omega"], arrays["eta"])
