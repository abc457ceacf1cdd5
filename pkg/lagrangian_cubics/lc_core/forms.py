"""Homogeneous forms, symmetric tensors and linear changes of variables."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, permutations, product
from math import comb, factorial, prod
import numbers
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence, Union

import numpy as np
import sympy as sp

from . import linalg
from .errors import InvalidInputError
from .utils import as_fraction, is_exact_scalar, to_sympy_scalar

Scalar = Union[Fraction, float]
Exponent = tuple[int, ...]

EXACT = "exact"
FLOAT = "float64"
SCALAR_MODES = (EXACT, FLOAT)


def monomial_dimension(n: int, d: int) -> int:
    """Dimension of the space of degree-``d`` forms in ``n`` variables."""

    if n < 1 or d < 0:
        raise InvalidInputError("monomial_dimension needs n >= 1 and d >= 0")
    return comb(n + d - 1, d)


def cubic_moduli_dimension(n: int) -> int:
    """``binom(n+2, 3) - n**2``, the dimension of cubic forms modulo GL(n)."""

    if n < 1:
        raise InvalidInputError("cubic_moduli_dimension needs n >= 1")
    return comb(n, 3)


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[Exponent, ...]:
    """All exponent vectors of degree ``d`` in graded lexicographic order."""

    out = []
    for combo in combinations_with_replacement(range(n), d):
        exp = [0] * n
        for index in combo:
            exp[index] += 1
        out.append(tuple(exp))
    return tuple(out)


def exponent_of(indices: Iterable[int], n: int) -> Exponent:
    exp = [0] * n
    for index in indices:
        exp[index] += 1
    return tuple(exp)


def indices_of(exp: Exponent) -> tuple[int, ...]:
    return tuple(i for i, e in enumerate(exp) for _ in range(e))


def multinomial_weight(exp: Exponent) -> int:
    """``prod(e_i!)``: tensor entry = polynomial coefficient times this weight."""

    return prod(factorial(e) for e in exp)


def _is_float_scalar(value: Any) -> bool:
    return isinstance(value, (float, np.floating)) or (
        isinstance(value, sp.Basic) and value.is_Float
    )


def _convert(value: Any, mode: str) -> Scalar:
    if mode == EXACT:
        if _is_float_scalar(value):
            raise InvalidInputError("float coefficient given to an exact form")
        return as_fraction(value)
    if isinstance(value, str):
        return float(as_fraction(value))
    return float(value)


def _infer_mode(values: Iterable[Any]) -> str:
    return FLOAT if any(_is_float_scalar(v) for v in values) else EXACT


@dataclass(frozen=True, eq=False)
class HomogeneousForm:
    """A degree-``d`` homogeneous polynomial in ``n`` variables.

    Coefficients are stored per monomial (polynomial convention).  Zero
    coefficients are dropped on construction so equality is coefficient-wise.
    """

    dim: int
    degree: int
    coeffs: Mapping[Exponent, Scalar] = field(default_factory=dict)
    scalar_mode: Optional[str] = None

    def __post_init__(self) -> None:
        if self.dim < 1 or self.degree < 0:
            raise InvalidInputError("form needs dim >= 1 and degree >= 0")
        raw = dict(self.coeffs)
        mode = self.scalar_mode or _infer_mode(raw.values())
        if mode not in SCALAR_MODES:
            raise InvalidInputError(f"unknown scalar mode {mode!r}")
        normalized: dict[Exponent, Scalar] = {}
        for key, value in raw.items():
            exp = tuple(int(e) for e in key)
            if len(exp) != self.dim or any(e < 0 for e in exp) or sum(exp) != self.degree:
                raise InvalidInputError(
                    f"exponent {exp} does not fit dim={self.dim}, degree={self.degree}"
                )
            scalar = _convert(value, mode)
            if scalar != 0:
                normalized[exp] = normalized.get(exp, 0) + scalar
        ordered = {exp: normalized[exp] for exp in monomials(self.dim, self.degree) if normalized.get(exp, 0) != 0}
        object.__setattr__(self, "coeffs", ordered)
        object.__setattr__(self, "scalar_mode", mode)

    @classmethod
    def zero(cls, dim: int, degree: int, scalar_mode: str = EXACT) -> "HomogeneousForm":
        return cls(dim, degree, {}, scalar_mode)

    @classmethod
    def from_sympy(
        cls, expr: Any, symbols: Sequence[sp.Symbol], scalar_mode: Optional[str] = None
    ) -> "HomogeneousForm":
        poly = sp.Poly(sp.expand(sp.sympify(expr)), *symbols)
        if poly.is_zero:
            raise InvalidInputError("cannot infer the degree of the zero polynomial")
        degrees = {sum(m) for m in poly.monoms()}
        if len(degrees) != 1:
            raise InvalidInputError("expression is not homogeneous")
        coeffs = {tuple(m): c for m, c in zip(poly.monoms(), poly.coeffs())}
        return cls(len(symbols), degrees.pop(), coeffs, scalar_mode)

    @property
    def is_exact(self) -> bool:
        return self.scalar_mode == EXACT

    def coefficient(self, exp: Sequence[int]) -> Scalar:
        return self.coeffs.get(tuple(exp), Fraction(0) if self.is_exact else 0.0)

    def terms(self) -> Iterator[tuple[Exponent, Scalar]]:
        return iter(self.coeffs.items())

    def coefficient_vector(self) -> list[Scalar]:
        return [self.coefficient(exp) for exp in monomials(self.dim, self.degree)]

    def __call__(self, x: Sequence[Any]) -> Any:
        return evaluate(self, x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.degree == other.degree
            and dict(self.coeffs) == dict(other.coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.degree, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        return f"HomogeneousForm(dim={self.dim}, degree={self.degree}, {self.to_sympy()})"

    def _combined_mode(self, other: "HomogeneousForm") -> str:
        return EXACT if self.is_exact and other.is_exact else FLOAT

    def _cast(self, value: Any, mode: str) -> Scalar:
        return as_fraction(value) if mode == EXACT else float(value)

    def __add__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise InvalidInputError("cannot add forms of different shape")
        mode = self._combined_mode(other)
        coeffs: dict[Exponent, Scalar] = {k: self._cast(v, mode) for k, v in self.coeffs.items()}
        for exp, value in other.coeffs.items():
            coeffs[exp] = coeffs.get(exp, 0) + self._cast(value, mode)
        return HomogeneousForm(self.dim, self.degree, coeffs, mode)

    def __neg__(self) -> "HomogeneousForm":
        return self.scale(-1)

    def __sub__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        return self + (-other)

    def scale(self, factor: Any) -> "HomogeneousForm":
        mode = EXACT if self.is_exact and is_exact_scalar(factor) else FLOAT
        factor = self._cast(factor, mode)
        return HomogeneousForm(
            self.dim,
            self.degree,
            {k: self._cast(v, mode) * factor for k, v in self.coeffs.items()},
            mode,
        )

    def __mul__(self, other: Any) -> "HomogeneousForm":
        if isinstance(other, HomogeneousForm):
            if self.dim != other.dim:
                raise InvalidInputError("cannot multiply forms in different dimensions")
            mode = self._combined_mode(other)
            coeffs: dict[Exponent, Scalar] = {}
            for ea, ca in self.coeffs.items():
                for eb, cb in other.coeffs.items():
                    exp = tuple(a + b for a, b in zip(ea, eb))
                    coeffs[exp] = coeffs.get(exp, 0) + self._cast(ca, mode) * self._cast(cb, mode)
            return HomogeneousForm(self.dim, self.degree + other.degree, coeffs, mode)
        if isinstance(other, (numbers.Number, sp.Basic)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def partial(self, i: int) -> "HomogeneousForm":
        if not 0 <= i < self.dim:
            raise InvalidInputError(f"variable index {i} out of range")
        if self.degree == 0:
            return HomogeneousForm.zero(self.dim, 0, self.scalar_mode)
        coeffs: dict[Exponent, Scalar] = {}
        for exp, value in self.coeffs.items():
            if exp[i]:
                lowered = list(exp)
                lowered[i] -= 1
                coeffs[tuple(lowered)] = value * exp[i]
        return HomogeneousForm(self.dim, self.degree - 1, coeffs, self.scalar_mode)

    def gradient(self) -> list["HomogeneousForm"]:
        return [self.partial(i) for i in range(self.dim)]

    def hessian_at(self, x: Sequence[Any]) -> np.ndarray:
        """Matrix of second partials evaluated at ``x``."""

        grads = self.gradient()
        exact = self.is_exact and all(is_exact_scalar(v) for v in x)
        out = linalg.zeros_like_mode((self.dim, self.dim), exact)
        for i, gi in enumerate(grads):
            for j in range(i, self.dim):
                value = evaluate(gi.partial(j), x)
                out[i, j] = value
                out[j, i] = value
        return out

    def is_zero(self, tol: float = 0.0) -> bool:
        if not self.coeffs:
            return True
        if self.is_exact or tol == 0.0:
            return False
        return max(abs(v) for v in self.coeffs.values()) <= tol

    def max_abs(self) -> float:
        return max((abs(float(v)) for v in self.coeffs.values()), default=0.0)

    def as_float(self) -> "HomogeneousForm":
        return HomogeneousForm(
            self.dim, self.degree, {k: float(v) for k, v in self.coeffs.items()}, FLOAT
        )

    def as_exact(self, max_denominator: int = 10**12) -> "HomogeneousForm":
        if self.is_exact:
            return self
        coeffs = {k: Fraction(v).limit_denominator(max_denominator) for k, v in self.coeffs.items()}
        return HomogeneousForm(self.dim, self.degree, coeffs, EXACT)

    def symbols(self) -> tuple[sp.Symbol, ...]:
        return default_symbols(self.dim)

    def to_sympy(self, symbols: Optional[Sequence[sp.Symbol]] = None) -> sp.Expr:
        symbols = tuple(symbols or self.symbols())
        return sp.Add(
            *[
                to_sympy_scalar(c) * sp.Mul(*[s**e for s, e in zip(symbols, exp)])
                for exp, c in self.coeffs.items()
            ]
        )


def default_symbols(n: int) -> tuple[sp.Symbol, ...]:
    if n <= 3:
        return sp.symbols("x y z")[:n]
    return sp.symbols(f"x1:{n + 1}")


def parse_form(text: str, dim: Optional[int] = None, scalar_mode: Optional[str] = None) -> HomogeneousForm:
    """Parse an expression such as ``"x**2*y/2 - x*y**2/2"``.

    Variables are ``x, y, z`` for up to three variables or ``x1..xn``.
    """

    expr = sp.sympify(text, rational=scalar_mode != FLOAT)
    if dim is None:
        names = {s.name for s in expr.free_symbols}
        if names <= {"x", "y", "z"}:
            dim = 3 if "z" in names else 2 if "y" in names else 1
        else:
            try:
                dim = max(int(name[1:]) for name in names)
            except ValueError as exc:
                raise InvalidInputError(f"cannot infer dimension from {sorted(names)}") from exc
    symbols = default_symbols(dim)
    unknown = {s.name for s in expr.free_symbols} - {s.name for s in symbols}
    if unknown:
        raise InvalidInputError(f"unknown variables {sorted(unknown)} for dim={dim}")
    expr = expr.subs({sp.Symbol(s.name): s for s in symbols})
    return HomogeneousForm.from_sympy(expr, symbols, scalar_mode)


def evaluate(F: HomogeneousForm, x: Sequence[Any]) -> Any:
    """Value of ``F`` at the point ``x``."""

    if len(x) != F.dim:
        raise InvalidInputError(f"point has length {len(x)}, form has dim {F.dim}")
    total: Any = Fraction(0) if F.is_exact else 0.0
    for exp, c in F.coeffs.items():
        term: Any = c
        for xi, e in zip(x, exp):
            if e:
                term = term * xi**e
        total = total + term
    return total


@dataclass(frozen=True, eq=False)
class SymTensor:
    """Fully symmetric ``order``-way array of scalars in ``dim`` dimensions."""

    dim: int
    order: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = _coerce_entries(self.entries)
        if entries.shape != (self.dim,) * self.order:
            raise InvalidInputError(
                f"tensor shape {entries.shape} does not match dim={self.dim}, order={self.order}"
            )
        object.__setattr__(self, "entries", entries)
        if not self._check_symmetric():
            raise InvalidInputError("tensor entries are not symmetric")

    def _check_symmetric(self, tol: float = 1e-10) -> bool:
        arr = self.entries
        scale = 1.0 if self.is_exact or arr.size == 0 else max(1.0, float(np.max(np.abs(arr))))
        for axis in range(self.order - 1):
            swapped = np.swapaxes(arr, axis, axis + 1)
            if self.is_exact:
                if not np.all(swapped == arr):
                    return False
            elif np.max(np.abs(swapped - arr), initial=0.0) > tol * scale:
                return False
        return True

    @classmethod
    def zeros(cls, dim: int, order: int, exact: bool = True) -> "SymTensor":
        return cls(dim, order, linalg.zeros_like_mode((dim,) * order, exact))

    @property
    def is_exact(self) -> bool:
        return self.entries.dtype == object

    def __getitem__(self, index: tuple[int, ...]) -> Any:
        return self.entries[index]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymTensor):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.order == other.order
            and bool(np.all(self.entries == other.entries))
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.order, tuple(self.entries.ravel().tolist())))

    def as_float(self) -> "SymTensor":
        return SymTensor(self.dim, self.order, linalg.as_float_array(self.entries))

    def contract(self, vector: Sequence[Any]) -> np.ndarray:
        """Contract the first slot with ``vector``: ``v_k T_{k...}``."""

        return np.tensordot(np.asarray(vector, dtype=self.entries.dtype), self.entries, axes=([0], [0]))

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.is_exact:
            return bool(np.all(self.entries == 0))
        return float(np.max(np.abs(self.entries), initial=0.0)) <= tol


def symmetrize(array: np.ndarray) -> np.ndarray:
    """Average of ``array`` over all permutations of its axes."""

    order = array.ndim
    perms = list(permutations(range(order)))
    total = sum(np.transpose(array, p) for p in perms)
    if array.dtype == object:
        return total * Fraction(1, len(perms))
    return total / len(perms)


def polarize(F: HomogeneousForm) -> SymTensor:
    """Tensor ``S`` with ``F(q) = (1/d!) S_{i1..id} q^i1 .. q^id``."""

    n, d = F.dim, F.degree
    out = linalg.zeros_like_mode((n,) * d, F.is_exact)
    for index in product(range(n), repeat=d):
        exp = exponent_of(index, n)
        c = F.coeffs.get(exp)
        if c is not None:
            out[index] = c * multinomial_weight(exp)
    return SymTensor(n, d, out)


def depolarize(T: SymTensor) -> HomogeneousForm:
    """Inverse of :func:`polarize`."""

    coeffs: dict[Exponent, Scalar] = {}
    for exp in monomials(T.dim, T.order):
        value = T.entries[indices_of(exp)]
        weight = multinomial_weight(exp)
        coeffs[exp] = as_fraction(value) / weight if T.is_exact else float(value) / weight
    return HomogeneousForm(T.dim, T.order, coeffs, EXACT if T.is_exact else FLOAT)


@dataclass(frozen=True, eq=False)
class LinearTransform:
    """Square matrix acting on variables, ``x -> matrix @ x``."""

    matrix: np.ndarray
    invertible: bool = field(init=False)

    def __post_init__(self) -> None:
        matrix = _coerce_entries(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidInputError("transform must be a square matrix")
        object.__setattr__(self, "matrix", matrix)
        determinant = linalg.det(matrix)
        if self.is_exact:
            invertible = determinant != 0
        else:
            scale = max(1.0, float(np.max(np.abs(matrix)))) ** matrix.shape[0]
            invertible = abs(determinant) > 1e-12 * scale
        object.__setattr__(self, "invertible", bool(invertible))

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "LinearTransform":
        eye = linalg.zeros_like_mode((n, n), exact)
        for i in range(n):
            eye[i, i] = Fraction(1) if exact else 1.0
        return cls(eye)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]]) -> "LinearTransform":
        return cls(linalg.coerce_array(rows))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.matrix.dtype == object

    def det(self) -> Scalar:
        return linalg.det(self.matrix)

    def inverse(self) -> "LinearTransform":
        if not self.invertible:
            raise InvalidInputError("transform is singular")
        return LinearTransform(linalg.inverse(self.matrix))

    def __matmul__(self, other: "LinearTransform") -> "LinearTransform":
        if not isinstance(other, LinearTransform):
            return NotImplemented
        if self.is_exact != other.is_exact:
            return LinearTransform(linalg.as_float_array(self.matrix) @ linalg.as_float_array(other.matrix))
        return LinearTransform(self.matrix.dot(other.matrix))

    def as_float(self) -> "LinearTransform":
        return LinearTransform(linalg.as_float_array(self.matrix))

    def apply(self, x: Sequence[Any]) -> np.ndarray:
        return self.matrix.dot(np.asarray(x, dtype=self.matrix.dtype))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearTransform):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(np.all(self.matrix == other.matrix))

    def __hash__(self) -> int:
        return hash(tuple(self.matrix.ravel().tolist()))


def transform_tensor(T: SymTensor, matrix: np.ndarray) -> SymTensor:
    """``T'_{j1..jd} = T_{i1..id} M_{i1 j1} .. M_{id jd}``."""

    if matrix.shape != (T.dim, T.dim):
        raise InvalidInputError("transform dimension does not match tensor")
    entries = T.entries
    if T.is_exact != linalg.is_exact_array(matrix):
        entries = linalg.as_float_array(entries)
        matrix = linalg.as_float_array(matrix)
    for _ in range(T.order):
        entries = np.tensordot(entries, matrix, axes=([0], [0]))
    return SymTensor(T.dim, T.order, entries)


def change_variables(F: HomogeneousForm, T: LinearTransform) -> HomogeneousForm:
    """The form ``x -> F(T x)``."""

    if T.dim != F.dim:
        raise InvalidInputError(f"transform has dim {T.dim}, form has dim {F.dim}")
    if F.degree == 0:
        return F
    return depolarize(transform_tensor(polarize(F), T.matrix))


def act(F: HomogeneousForm, A: LinearTransform) -> HomogeneousForm:
    """Group action ``F -> F o A^-1``."""

    return change_variables(F, A.inverse())


def _coerce_entries(values: Any) -> np.ndarray:
    raw = np.asarray(values)
    if raw.dtype == object or raw.dtype.kind in "iu":
        return linalg.coerce_array(raw)
    return raw.astype(float)


def unused_directions(F: HomogeneousForm) -> np.ndarray:
    """Directions ``w`` with ``F(x + t w) = F(x)``, as columns.

    These span the kernel of ``w -> S(w, ., .)`` for the polarized tensor ``S``.
    """

    if F.degree == 0:
        return linalg.as_exact_array(np.eye(F.dim, dtype=int)) if F.is_exact else np.eye(F.dim)
    entries = polarize(F).entries.reshape(F.dim, -1)
    return linalg.nullspace(entries.T)


def essential_variables(F: HomogeneousForm) -> int:
    """Least number of variables ``F`` can be written in after a linear change."""

    return F.dim - unused_directions(F).shape[1]
