"""Utility helpers used across the package."""

from __future__ import annotations

from fractions import Fraction
import numbers
from typing import Any, Optional

import numpy as np
import sympy as sp

from .errors import InvalidInputError


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """Return a dedicated :class:`numpy.random.Generator` instance."""

    return np.random.default_rng(seed)


def spawn_rngs(seed: Optional[int], count: int) -> list[np.random.Generator]:
    """Independent generators for ``count`` trials derived from one master seed."""

    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def is_exact_scalar(value: Any) -> bool:
    return isinstance(value, (Fraction, numbers.Integral, sp.Rational)) and not isinstance(value, bool)


def as_fraction(value: Any) -> Fraction:
    """Convert an integer, rational, sympy rational or ``"p/q"`` string to a Fraction."""

    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInputError("boolean is not a scalar")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise InvalidInputError(f"cannot parse rational scalar {value!r}") from exc
    if isinstance(value, sp.Basic) and value.is_Rational:
        return Fraction(int(value.p), int(value.q))
    raise InvalidInputError(f"not an exact scalar: {value!r}")


def to_sympy_scalar(value: Any) -> sp.Expr:
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, (float, np.floating)):
        return sp.Float(float(value))
    return sp.sympify(value)


def random_invertible_rational(
    n: int, rng: np.random.Generator, *, low: int = -3, high: int = 3, max_condition: float = 1e3
) -> np.ndarray:
    """Draw a small-integer matrix with nonzero determinant as an exact object array."""

    while True:
        candidate = rng.integers(low, high + 1, size=(n, n))
        det = round(np.linalg.det(candidate))
        if det == 0 or np.linalg.cond(candidate) > max_condition:
            continue
        return np.array([[Fraction(int(v)) for v in row] for row in candidate], dtype=object)
