"""Exact (rational) and float linear algebra on numpy arrays.

Exact arrays are numpy ``object`` arrays holding :class:`fractions.Fraction`
entries; rank, determinant and kernels of those go through sympy so that the
answer is exact.  Float arrays use numpy/scipy directly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Optional

import numpy as np
import sympy as sp
from scipy.linalg import null_space

from .errors import InvalidInputError
from .utils import as_fraction, is_exact_scalar, to_sympy_scalar

DEFAULT_RANK_TOL = 1e-9


def is_exact_array(array: np.ndarray) -> bool:
    return array.dtype == object


def as_exact_array(values: Any) -> np.ndarray:
    """Object array of Fractions; raises if any entry is not rational."""

    array = np.asarray(values, dtype=object)
    flat = [as_fraction(v) for v in array.ravel()]
    out = np.empty(array.shape, dtype=object)
    for index, value in zip(np.ndindex(array.shape), flat):
        out[index] = value
    return out


def as_float_array(values: Any) -> np.ndarray:
    array = np.asarray(values, dtype=object)
    return np.array([float(v) for v in array.ravel()], dtype=float).reshape(array.shape)


def coerce_array(values: Any) -> np.ndarray:
    """Exact object array when every entry is rational, float array otherwise."""

    array = np.asarray(values, dtype=object)
    if array.size and all(is_exact_scalar(v) or isinstance(v, str) for v in array.ravel()):
        return as_exact_array(array)
    return as_float_array(array)


def zeros_like_mode(shape: tuple[int, ...], exact: bool) -> np.ndarray:
    if not exact:
        return np.zeros(shape)
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def to_sympy_matrix(array: np.ndarray) -> sp.Matrix:
    array = np.atleast_2d(array)
    return sp.Matrix(array.shape[0], array.shape[1], [to_sympy_scalar(v) for v in array.ravel()])


def from_sympy_matrix(matrix: sp.Matrix) -> np.ndarray:
    return as_exact_array([[matrix[i, j] for j in range(matrix.cols)] for i in range(matrix.rows)])


def det(array: np.ndarray) -> Any:
    if is_exact_array(array):
        return as_fraction(to_sympy_matrix(array).det())
    return float(np.linalg.det(array))


def inverse(array: np.ndarray) -> np.ndarray:
    if is_exact_array(array):
        matrix = to_sympy_matrix(array)
        if matrix.det() == 0:
            raise InvalidInputError("matrix is singular")
        return from_sympy_matrix(matrix.inv())
    try:
        return np.linalg.inv(array)
    except np.linalg.LinAlgError as exc:
        raise InvalidInputError("matrix is singular") from exc


def rank(array: np.ndarray, tol: Optional[float] = None) -> int:
    array = np.atleast_2d(array)
    if array.size == 0:
        return 0
    if is_exact_array(array):
        return int(to_sympy_matrix(array).rank())
    scale = max(1.0, float(np.max(np.abs(array))))
    return int(np.linalg.matrix_rank(array, tol=(tol or DEFAULT_RANK_TOL) * scale))


def nullspace(array: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Kernel basis as the columns of the returned array."""

    array = np.atleast_2d(array)
    cols = array.shape[1]
    if is_exact_array(array):
        basis = to_sympy_matrix(array).nullspace()
        if not basis:
            return zeros_like_mode((cols, 0), exact=True)
        return from_sympy_matrix(sp.Matrix.hstack(*basis))
    return null_space(array.astype(float), rcond=tol or DEFAULT_RANK_TOL)


def is_symmetric(array: np.ndarray, tol: float = 1e-12) -> bool:
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        return False
    if is_exact_array(array):
        return bool(np.all(array == array.T))
    scale = max(1.0, float(np.max(np.abs(array)))) if array.size else 1.0
    return bool(np.max(np.abs(array - array.T), initial=0.0) <= tol * scale)


def inertia(array: np.ndarray, tol: float = 1e-9) -> tuple[int, int, int]:
    """Counts of (positive, negative, zero) eigenvalues of a symmetric matrix.

    Exact input is handled with Descartes' rule on the characteristic
    polynomial, which is exact for real-rooted polynomials.
    """

    n = array.shape[0]
    if is_exact_array(array):
        lam = sp.Symbol("lam")
        poly = sp.Poly(to_sympy_matrix(array).charpoly(lam).as_expr(), lam)
        coeffs = [c for c in reversed(poly.all_coeffs())]
        zero = 0
        while zero < len(coeffs) and coeffs[zero] == 0:
            zero += 1
        remaining = list(reversed(coeffs[zero:]))
        positive = _sign_changes(remaining)
        mirrored = [c * (-1) ** (len(remaining) - 1 - i) for i, c in enumerate(remaining)]
        negative = _sign_changes(mirrored)
        return positive, negative, n - positive - negative
    eigvals = np.linalg.eigvalsh(array.astype(float))
    scale = max(1.0, float(np.max(np.abs(eigvals)))) if eigvals.size else 1.0
    positive = int(np.sum(eigvals > tol * scale))
    negative = int(np.sum(eigvals < -tol * scale))
    return positive, negative, n - positive - negative


def _sign_changes(coeffs: list[Any]) -> int:
    signs = [1 if c > 0 else -1 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def independent_rows(array: np.ndarray, tol: Optional[float] = None) -> list[int]:
    """Indices of a maximal linearly independent subset of the rows, greedily from the top."""

    array = np.atleast_2d(array)
    if array.shape[0] == 0:
        return []
    if is_exact_array(array):
        _, pivots = to_sympy_matrix(array).T.rref()
        return list(pivots)
    kept: list[int] = []
    for index in range(array.shape[0]):
        if rank(array[kept + [index]], tol) > len(kept):
            kept.append(index)
    return kept
