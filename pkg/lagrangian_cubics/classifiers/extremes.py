"""Extreme-point type of a cubic invariant from directional contractions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import logging
from typing import Optional, Sequence

import numpy as np

from ..lc_core import linalg
from ..lc_core.errors import InvalidInputError
from ..lc_core.forms import HomogeneousForm, SymTensor, change_variables, depolarize, polarize
from ..lc_core.utils import make_rng
from . import binary, ternary
from .binary import BinaryLabel

logger = logging.getLogger(__name__)

MARGIN_TOL = 1e-9
GRID_DENSITY = 2000
POLISH_ITERATIONS = 100


class ExtremeKind(str, Enum):
    EXTREME = "extreme"
    WEAK_EXTREME = "weak_extreme"
    NEITHER = "neither"


@dataclass(frozen=True)
class ExtremeVerdict:
    kind: ExtremeKind
    witness_direction: Optional[np.ndarray]
    definiteness_margin: float
    boundary: bool = False

    def as_record(self) -> dict[str, object]:
        return {
            "kind": self.kind.value,
            "witness": None if self.witness_direction is None else [float(v) for v in self.witness_direction],
            "margin": self.definiteness_margin,
            "boundary": self.boundary,
        }


_BINARY_KINDS: dict[BinaryLabel, ExtremeKind] = {
    BinaryLabel.ZERO: ExtremeKind.WEAK_EXTREME,
    BinaryLabel.PERFECT_CUBE: ExtremeKind.WEAK_EXTREME,
    BinaryLabel.SQUARE_TIMES_LINEAR: ExtremeKind.WEAK_EXTREME,
    BinaryLabel.LINEAR_TIMES_IRRED_QUADRATIC: ExtremeKind.EXTREME,
    BinaryLabel.THREE_DISTINCT_REAL_FACTORS: ExtremeKind.NEITHER,
}


def contraction(C: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``M(u)_ij = u_k C_ijk``."""

    return np.tensordot(C, u, axes=([2], [0]))


def margin(C: np.ndarray, u: np.ndarray) -> float:
    """``-lambda_max(M(u))``; positive exactly when ``M(u)`` is negative definite."""

    return -float(np.linalg.eigvalsh(contraction(C, u))[-1])


def sphere_grid(n: int, density: int = GRID_DENSITY, seed: int = 0) -> np.ndarray:
    """Unit vectors: equal angles for ``n = 2``, a Fibonacci lattice for ``n = 3``."""

    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        angles = 2 * np.pi * np.arange(density) / density
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if n == 3:
        k = np.arange(density) + 0.5
        polar = np.arccos(1 - 2 * k / density)
        azimuth = np.pi * (1 + 5**0.5) * k
        return np.column_stack([np.cos(azimuth) * np.sin(polar), np.sin(azimuth) * np.sin(polar), np.cos(polar)])
    points = make_rng(seed).normal(size=(density, n))
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def _polish(C: np.ndarray, u: np.ndarray, iterations: int) -> np.ndarray:
    """Projected gradient ascent of the margin on the unit sphere."""

    step = 0.5
    current = margin(C, u)
    for _ in range(iterations):
        values, vectors = np.linalg.eigh(contraction(C, u))
        v = vectors[:, -1]
        # d lambda_max / du_k = v_i v_j C_ijk
        grad = -np.einsum("i,j,ijk->k", v, v, C)
        grad -= (grad @ u) * u
        if np.linalg.norm(grad) < 1e-14:
            break
        while step > 1e-14:
            trial = u + step * grad
            trial /= np.linalg.norm(trial)
            value = margin(C, trial)
            if value > current:
                u, current = trial, value
                step *= 1.5
                break
            step *= 0.5
        else:
            break
    return u


def _search(C: np.ndarray, density: int, iterations: int) -> tuple[np.ndarray, float]:
    grid = sphere_grid(C.shape[0], density)
    margins = np.array([margin(C, u) for u in grid])
    best = None
    best_margin = -np.inf
    for index in np.argsort(margins)[::-1][:5]:
        u = _polish(C, grid[index], iterations)
        value = margin(C, u)
        if value > best_margin:
            best, best_margin = u, value
    return best, best_margin


def _kind_from_margin(value: float, scale: float) -> tuple[ExtremeKind, bool]:
    tol = MARGIN_TOL * max(scale, 1.0)
    if value > tol:
        return ExtremeKind.EXTREME, False
    if value >= -tol:
        return ExtremeKind.WEAK_EXTREME, True
    return ExtremeKind.NEITHER, False


def extreme_type(
    C: SymTensor, grid_density: int = GRID_DENSITY, polish_iters: int = POLISH_ITERATIONS
) -> ExtremeVerdict:
    """Classify the point by whether some ``u_k C_ijk`` can be made negative definite.

    For ``n = 2`` the closed classification by binary orbit is authoritative
    and the sphere search only supplies the witness; a disagreement is logged.
    """

    if C.order != 3:
        raise InvalidInputError("extreme_type expects an order-3 tensor")
    entries = linalg.as_float_array(C.entries)
    scale = float(np.max(np.abs(entries))) if entries.size else 0.0
    if scale == 0.0:
        return ExtremeVerdict(ExtremeKind.WEAK_EXTREME, None, 0.0, boundary=True)
    witness, best = _search(entries, grid_density, polish_iters)
    kind, boundary = _kind_from_margin(best, scale)
    if C.dim == 2:
        closed = _BINARY_KINDS[binary.classify_binary(depolarize(C), witness=False).label]
        if closed is not kind:
            logger.warning("sphere search gives %s, binary orbit gives %s (margin %.3e)", kind.value, closed.value, best)
            kind = closed
    return ExtremeVerdict(kind, witness, best, boundary)


def slice_cubic(C: SymTensor, keep: Sequence[int]) -> SymTensor:
    """Restriction of the cubic to the coordinate subspace spanned by ``keep``."""

    keep = list(keep)
    if not keep:
        raise InvalidInputError("keep must be nonempty")
    if len(set(keep)) != len(keep) or any(not 0 <= k < C.dim for k in keep):
        raise InvalidInputError(f"bad slice indices {keep} for dim {C.dim}")
    return SymTensor(len(keep), C.order, C.entries[np.ix_(keep, keep, keep)])


def hesse_slice(F: HomogeneousForm) -> SymTensor:
    """Hesse-normalize a nonsingular ternary cubic, then drop ``z``."""

    normalization = ternary.hesse_normalize(F)
    G = change_variables(F.as_float(), normalization.transform)
    return slice_cubic(polarize(G), [0, 1])
