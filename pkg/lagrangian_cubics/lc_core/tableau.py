"""Tableau products, integral elements and Cartan's test for a constant cubic invariant.

Frames along a Lagrangian with constant cubic invariant ``C`` solve the
Pfaffian system ``eta = 0``, ``theta_ij = gamma_ij - C_ijk omega^k = 0``.
Modulo the system, the structure equations give

    d theta_ij = (alpha . C)_ijk ^ omega^k,
    (alpha . C)_ijk = C_ljk alpha^l_i + C_ilk alpha^l_j + C_ijl alpha^l_k,

so the tableau is the image of ``gl(n)`` under ``X -> X . C`` read as maps
``V -> S^2 V*``; the shear forms ``beta`` never enter and stay free.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
import logging
from typing import Any, Optional, Sequence

import numpy as np

from . import linalg
from .errors import InvalidInputError, NonConvergenceError
from .forms import SymTensor
from .utils import make_rng, random_invertible_rational

logger = logging.getLogger(__name__)

FLAG_TRIALS = 5
FLAG_RANGE = 12
MAX_PROLONGATIONS = 4

TABULATED_GENERALITY: dict[tuple[int, str], str] = {
    (2, "zero"): "all Lagrangian planes",
    (2, "perfect_cube"): "2 functions of 1 variable",
    (2, "square_times_linear"): "3 functions of 1 variable",
    (2, "linear_times_irred_quadratic"): "1 function of 2 variables",
    (2, "three_distinct_real_factors"): "1 function of 2 variables",
    (3, "zero"): "all Lagrangian affine planes",
    (3, "perfect_cube"): "3 functions of 1 variable",
    (3, "square_times_indep_linear"): "5 functions of 1 variable",
    (3, "three_distinct_dependent_factors"): "1 function of 2 variables",
    (3, "linear_times_dependent_semidef_quad"): "1 function of 2 variables",
    (3, "three_independent_factors"): "1 constant",
    (3, "linear_times_indep_semidef_quad"): "1 constant",
    (3, "null_linear_times_lorentz_quad"): "1 function of 2 variables",
    (3, "def_linear_times_lorentz_quad"): "8 functions of 1 variable",
    (3, "split_linear_times_lorentz_quad"): "8 functions of 1 variable",
    (3, "linear_times_definite_quad"): "2 functions of 2 variables",
    (3, "cuspidal"): "2 functions of 2 variables",
    (3, "imaginary_nodal"): "3 functions of 2 variables",
    (3, "real_nodal"): "3 functions of 2 variables",
    (3, "nonsingular"): "3 functions of 2 variables",
}

AFFINE_PLANES = "all Lagrangian affine planes"
FROBENIUS = "frobenius: finite-dimensional solution space"
PROLONGATION_REQUIRED = "prolongation required"


@dataclass(frozen=True)
class BilinearToVectorMap:
    """``A(u, v)^i = A^i_jk u^j v^k`` with ``entries[i, j, k] = A^i_jk``."""

    dim: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        raw = np.asarray(self.entries)
        entries = linalg.coerce_array(raw) if raw.dtype == object or raw.dtype.kind in "iu" else raw.astype(float)
        if entries.shape != (self.dim,) * 3:
            raise InvalidInputError(f"map entries have shape {entries.shape}, expected {(self.dim,) * 3}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zeros(cls, dim: int, exact: bool = True) -> "BilinearToVectorMap":
        return cls(dim, linalg.zeros_like_mode((dim,) * 3, exact))

    @classmethod
    def rank_one(cls, w: Sequence[Any], L: Any) -> "BilinearToVectorMap":
        """``A(u, v) = w <L u, v>`` for a vector ``w`` and a map ``L : V -> V*``."""

        w = linalg.coerce_array(list(w))
        L = np.atleast_2d(linalg.coerce_array(L))
        n = w.shape[0]
        if L.shape != (n, n):
            raise InvalidInputError("L must be n x n")
        if linalg.is_exact_array(w) != linalg.is_exact_array(L):
            w, L = linalg.as_float_array(w), linalg.as_float_array(L)
        # <L u, v> = L_kj u^j v^k
        return cls(n, np.multiply.outer(w, L.T))

    @property
    def is_exact(self) -> bool:
        return linalg.is_exact_array(self.entries)

    def __call__(self, u: Sequence[Any], v: Sequence[Any]) -> np.ndarray:
        inner = np.tensordot(self.entries, np.asarray(v, dtype=self.entries.dtype), axes=([2], [0]))
        return np.tensordot(inner, np.asarray(u, dtype=self.entries.dtype), axes=([1], [0]))


def _matched(A: np.ndarray, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if linalg.is_exact_array(A) != linalg.is_exact_array(C):
        return linalg.as_float_array(A), linalg.as_float_array(C)
    return A, C


def ac_product(A: BilinearToVectorMap, C: SymTensor) -> np.ndarray:
    """The 4-tensor ``AC``, symmetric in its first two slots and skew in the last two.

    ``AC(u1, u2, u3, u4) = C(u1, u2, A(u3, u4)) + C(u1, A(u2, u4), u3)
    + C(A(u1, u4), u2, u3)`` minus the same three terms with ``u3, u4`` swapped.
    """

    if C.order != 3:
        raise InvalidInputError("C must be an order-3 tensor")
    if A.dim != C.dim:
        raise InvalidInputError(f"dimension mismatch: map has dim {A.dim}, cubic has dim {C.dim}")
    a, c = _matched(A.entries, C.entries)
    first = np.tensordot(c, a, axes=([2], [0]))
    second = np.tensordot(c, a, axes=([1], [0])).transpose(0, 2, 1, 3)
    third = np.tensordot(c, a, axes=([0], [0])).transpose(2, 0, 1, 3)
    total = first + second + third
    return total - total.transpose(0, 1, 3, 2)


def bc_product(B: Any, C: SymTensor) -> BilinearToVectorMap:
    """``<lambda, BC(u, v)> = C(u, v, B lambda)``, i.e. ``A^i_jk = C_jkl B^li``."""

    B = np.atleast_2d(linalg.coerce_array(B))
    if B.shape != (C.dim, C.dim):
        raise InvalidInputError(f"B must be {C.dim} x {C.dim}")
    if not linalg.is_symmetric(B):
        raise InvalidInputError("B must be symmetric")
    b, c = _matched(B, C.entries)
    return BilinearToVectorMap(C.dim, np.tensordot(c, b, axes=([2], [0])).transpose(2, 0, 1))


def _unit_map(n: int, index: tuple[int, int, int], exact: bool) -> BilinearToVectorMap:
    entries = linalg.zeros_like_mode((n, n, n), exact)
    entries[index] = Fraction(1) if exact else 1.0
    return BilinearToVectorMap(n, entries)


def _independent_components(n: int) -> list[tuple[int, int, int, int]]:
    return [(a, b, c, d) for a in range(n) for b in range(a, n) for c in range(n) for d in range(c + 1, n)]


def ac_matrix(C: SymTensor) -> np.ndarray:
    """Matrix of ``A -> AC`` from ``Lin(V x V, V)`` (column ``(i, j, k)``) to ``S^2 V* x L^2 V*``."""

    n = C.dim
    rows = _independent_components(n)
    columns = []
    for index in np.ndindex(n, n, n):
        product = ac_product(_unit_map(n, index, C.is_exact), C)
        columns.append([product[r] for r in rows])
    matrix = np.array(columns, dtype=object if C.is_exact else float).T
    return matrix.reshape(len(rows), n**3)


def kernel_dimension(C: SymTensor) -> int:
    """``dim {A : AC = 0}``; exact for rational ``C``."""

    n = C.dim
    if n == 1:
        return 1
    return n**3 - linalg.rank(ac_matrix(C))


def integral_element_space(C: SymTensor) -> list[BilinearToVectorMap]:
    """A basis of ``{A : AC = 0}``."""

    n = C.dim
    if n == 1:
        return [_unit_map(1, (0, 0, 0), C.is_exact)]
    kernel = linalg.nullspace(ac_matrix(C))
    return [BilinearToVectorMap(n, kernel[:, j].reshape(n, n, n)) for j in range(kernel.shape[1])]


def structure_equation_matrix(C: SymTensor) -> np.ndarray:
    """Linear conditions on ``alpha^l_i = P^l_im omega^m`` from ``d theta_ij = 0`` modulo the system.

    Column ``(l, i, m)`` holds the coefficient of ``P^l_im``; row ``(i <= j, k < m)``
    is the ``omega^k ^ omega^m`` component of ``d theta_ij``.
    """

    n = C.dim
    c = C.entries
    exact = C.is_exact
    rows = [(i, j, k, m) for i in range(n) for j in range(i, n) for k in range(n) for m in range(k + 1, n)]
    matrix = linalg.zeros_like_mode((len(rows), n**3), exact)

    def column(l: int, x: int, y: int) -> int:
        return (l * n + x) * n + y

    for row, (i, j, k, m) in enumerate(rows):
        # E_ijkm - E_ijmk with E_ijkm = C_ljk P^l_im + C_ilk P^l_jm + C_ijl P^l_km
        for first, second, sign in ((k, m, 1), (m, k, -1)):
            for l in range(n):
                matrix[row, column(l, i, second)] += sign * c[l, j, first]
                matrix[row, column(l, j, second)] += sign * c[i, l, first]
                matrix[row, column(l, first, second)] += sign * c[i, j, l]
    return matrix


def gl_action(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``(X . C)_ijk = C_ljk X^l_i + C_ilk X^l_j + C_ijl X^l_k``."""

    X, C = _matched(X, C)
    first = np.tensordot(X, C, axes=([0], [0]))
    second = np.tensordot(C, X, axes=([1], [0])).transpose(0, 2, 1)
    third = np.tensordot(C, X, axes=([2], [0]))
    return first + second + third


def _action_matrix(C: SymTensor) -> np.ndarray:
    n = C.dim
    columns = []
    for l, i in np.ndindex(n, n):
        X = linalg.zeros_like_mode((n, n), C.is_exact)
        X[l, i] = Fraction(1) if C.is_exact else 1.0
        columns.append(gl_action(X, C.entries).ravel())
    return np.array(columns, dtype=object if C.is_exact else float).T


def isotropy_algebra(C: SymTensor) -> list[np.ndarray]:
    """Basis of ``{X in gl(n) : X . C = 0}``."""

    n = C.dim
    kernel = linalg.nullspace(_action_matrix(C))
    return [kernel[:, j].reshape(n, n) for j in range(kernel.shape[1])]


def bc_injective(C: SymTensor) -> bool:
    """Whether ``B -> BC`` is injective on symmetric ``B`` for this particular ``C``."""

    n = C.dim
    exact = C.is_exact
    images = []
    for i in range(n):
        for j in range(i, n):
            B = linalg.zeros_like_mode((n, n), exact)
            one = Fraction(1) if exact else 1.0
            B[i, j] = B[j, i] = one
            images.append(bc_product(B, C).entries.ravel())
    return linalg.rank(np.array(images, dtype=object if exact else float)) == n * (n + 1) // 2


@dataclass(frozen=True)
class Tableau:
    """Subspace of ``Hom(V, W)`` spanned by independent ``basis[r]`` of shape ``(w, n)``."""

    basis: np.ndarray

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    @property
    def width(self) -> int:
        return self.basis.shape[1]

    @property
    def n(self) -> int:
        return self.basis.shape[2]

    @property
    def is_exact(self) -> bool:
        return linalg.is_exact_array(self.basis)

    @classmethod
    def spanned_by(cls, elements: np.ndarray) -> "Tableau":
        flat = elements.reshape(elements.shape[0], -1)
        keep = linalg.independent_rows(flat) if elements.shape[0] else []
        return cls(elements[keep])

    def characters(self, flag: np.ndarray) -> tuple[int, ...]:
        """``s'_k`` along the flag spanned by the leading columns of ``flag``."""

        if self.dimension == 0:
            return (0,) * self.n
        if self.is_exact != linalg.is_exact_array(flag):
            flag = linalg.as_exact_array(flag) if self.is_exact else linalg.as_float_array(flag)
        partial = [0]
        for k in range(1, self.n + 1):
            evaluated = np.array([(element @ flag[:, :k]).ravel() for element in self.basis])
            partial.append(linalg.rank(evaluated))
        return tuple(b - a for a, b in zip(partial, partial[1:]))

    def prolongation(self) -> "Tableau":
        """First prolongation ``(A x V*) n (W x S^2 V*)`` as a tableau with ``W' = W x V*``."""

        r, w, n = self.basis.shape
        if r == 0:
            return Tableau(linalg.zeros_like_mode((0, w * n, n), self.is_exact))
        rows = [(x, k, m) for x in range(w) for k in range(n) for m in range(k + 1, n)]
        matrix = linalg.zeros_like_mode((len(rows), r * n), self.is_exact)
        for row, (x, k, m) in enumerate(rows):
            for s in range(r):
                # Q[x, k, m] = sum_s c[s, m] basis[s, x, k] must equal Q[x, m, k]
                matrix[row, s * n + m] += self.basis[s, x, k]
                matrix[row, s * n + k] -= self.basis[s, x, m]
        if rows:
            kernel = linalg.nullspace(matrix)
        else:
            kernel = linalg.as_exact_array(np.eye(r * n, dtype=int)) if self.is_exact else np.eye(r * n)
        elements = []
        for j in range(kernel.shape[1]):
            c = kernel[:, j].reshape(r, n)
            Q = np.tensordot(c, self.basis, axes=([0], [0])).transpose(1, 2, 0)
            elements.append(Q.reshape(w * n, n))
        if not elements:
            return Tableau(linalg.zeros_like_mode((0, w * n, n), self.is_exact))
        return Tableau(np.array(elements, dtype=self.basis.dtype))


def alpha_tableau(C: SymTensor) -> Tableau:
    """Image of ``X -> X . C`` as maps ``omega -> theta``, one row per ``i <= j``."""

    n = C.dim
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    elements = []
    for l, i in np.ndindex(n, n):
        X = linalg.zeros_like_mode((n, n), C.is_exact)
        X[l, i] = Fraction(1) if C.is_exact else 1.0
        image = gl_action(X, C.entries)
        elements.append([[image[a, b, k] for k in range(n)] for a, b in pairs])
    return Tableau.spanned_by(np.array(elements, dtype=object if C.is_exact else float))


def random_flags(n: int, trials: int = FLAG_TRIALS, seed: Optional[int] = 0) -> list[np.ndarray]:
    rng = make_rng(seed)
    return [random_invertible_rational(n, rng, low=-FLAG_RANGE, high=FLAG_RANGE) for _ in range(trials)]


def coordinate_flag(n: int) -> np.ndarray:
    return linalg.as_exact_array(np.eye(n, dtype=int))


def _partial_sums(characters: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(v) for v in np.cumsum(characters))


def generic_characters(tableau: Tableau, flags: Sequence[np.ndarray]) -> tuple[tuple[int, ...], int]:
    """Characters at the most generic of ``flags`` and how many flags reach them.

    Rank increments along a generic flag maximize every partial sum
    ``s'_1 + ... + s'_k`` at once, so the flag with the largest partial sums wins.
    """

    results = [tableau.characters(flag) for flag in flags]
    best = max(results, key=_partial_sums)
    counts = Counter(results)
    if len(counts) > 1:
        logger.warning("flags disagree on characters: %s; keeping %s", dict(counts), best)
    return best, counts[best]


def character_sum(characters: Sequence[int]) -> int:
    return sum((k + 1) * s for k, s in enumerate(characters))


def generality(characters: Sequence[int]) -> str:
    nonzero = [k for k, s in enumerate(characters) if s]
    if not nonzero:
        return FROBENIUS
    q = nonzero[-1] + 1
    s = characters[q - 1]
    return f"{s} function{'s' if s != 1 else ''} of {q} variable{'s' if q != 1 else ''}"


def same_generality(computed: str, tabulated: str) -> bool:
    """Whether a computed generality says what a tabulated one says.

    A finite-dimensional solution space is what a table entry counting
    constants means.
    """

    if computed == tabulated:
        return True
    if computed == FROBENIUS:
        return tabulated.endswith(("constant", "constants"))
    return computed == AFFINE_PLANES and tabulated.startswith("all Lagrangian")


@dataclass(frozen=True)
class Involution:
    """Where the prolongation tower of a tableau first passes Cartan's test."""

    level: Optional[int]
    characters: tuple[int, ...]
    dimensions: tuple[int, ...]

    @property
    def finite_type(self) -> bool:
        return self.level is not None and self.dimensions[self.level] == 0


def prolong_to_involution(
    tableau: Tableau, flags: Sequence[np.ndarray], max_prolongations: int = MAX_PROLONGATIONS
) -> Involution:
    """Prolong until Cartan's test passes or the tableau vanishes.

    ``level`` is ``None`` when neither happens within ``max_prolongations``.
    """

    dimensions = [tableau.dimension]
    current = tableau
    for level in range(max_prolongations + 1):
        if current.dimension == 0:
            return Involution(level, (0,) * tableau.n, tuple(dimensions))
        characters, _ = generic_characters(current, flags)
        following = current.prolongation()
        dimensions.append(following.dimension)
        logger.debug("level %d: characters %s, next dimension %d", level, characters, following.dimension)
        if following.dimension == character_sum(characters):
            return Involution(level, characters, tuple(dimensions))
        current = following
    return Involution(None, characters, tuple(dimensions))


@dataclass(frozen=True)
class TableauReport:
    kernel_dim: int
    characters: tuple[int, ...]
    character_sum: int
    prolongation_dim: int
    involutive: bool
    generality: str
    isotropy_dim: int
    free_shear_dim: int
    flag_votes: int
    prolongations: Optional[int] = 0
    prolonged_characters: Optional[tuple[int, ...]] = None
    prolongation_dims: tuple[int, ...] = ()
    tabulated: Optional[str] = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def agrees_with_tabulated(self) -> Optional[bool]:
        if self.tabulated is None:
            return None
        return same_generality(self.generality, self.tabulated)

    def as_record(self) -> dict[str, Any]:
        return {
            "kernel_dim": self.kernel_dim,
            "characters": list(self.characters),
            "character_sum": self.character_sum,
            "prolongation_dim": self.prolongation_dim,
            "involutive": self.involutive,
            "generality": self.generality,
            "isotropy_dim": self.isotropy_dim,
            "free_shear_dim": self.free_shear_dim,
            "flag_votes": self.flag_votes,
            "prolongations": self.prolongations,
            "prolonged_characters": None if self.prolonged_characters is None else list(self.prolonged_characters),
            "prolongation_dims": list(self.prolongation_dims),
            "tabulated": self.tabulated,
            "agrees_with_tabulated": self.agrees_with_tabulated,
            "notes": list(self.notes),
        }


def cartan_test(
    C: SymTensor,
    flags: Optional[Sequence[np.ndarray]] = None,
    seed: Optional[int] = 0,
    label: Optional[str] = None,
    max_prolongations: int = MAX_PROLONGATIONS,
) -> TableauReport:
    """Cartan's test for frames with constant cubic invariant ``C``.

    Characters are read at the most generic of ``flags`` (random integer
    flags by default).  The system is involutive when the first prolongation
    has dimension ``sum k s'_k``.  Otherwise the tableau is prolonged until the
    test passes or the tableau vanishes, and the generality is read from the
    first involutive prolongation; a vanishing tableau means finite type.
    """

    n = C.dim
    if C.order != 3:
        raise InvalidInputError("C must be an order-3 tensor")
    if n not in (2, 3):
        raise InvalidInputError(f"cartan_test supports n in (2, 3), got {n}")
    kernel = kernel_dimension(C)
    from_structure = n**3 - linalg.rank(structure_equation_matrix(C))
    if from_structure != kernel:
        raise NonConvergenceError(
            f"structure equations give {from_structure} integral-element dimensions, AC = 0 gives {kernel}"
        )
    isotropy_dim = len(isotropy_algebra(C))
    tableau = alpha_tableau(C)
    flags = list(flags) if flags is not None else random_flags(n, FLAG_TRIALS, seed)
    characters, votes = generic_characters(tableau, flags)
    prolonged = tableau.prolongation()
    if prolonged.dimension + n * isotropy_dim != kernel:
        raise NonConvergenceError(
            f"prolongation has dimension {prolonged.dimension}, expected {kernel - n * isotropy_dim}"
        )
    total = character_sum(characters)
    involutive = prolonged.dimension == total
    logger.debug("characters %s sum %d prolongation %d", characters, total, prolonged.dimension)
    notes: list[str] = []
    prolongations: Optional[int] = 0
    prolonged_characters = None
    dims: tuple[int, ...] = (tableau.dimension, prolonged.dimension)
    if C.is_zero():
        text = AFFINE_PLANES
        notes.append(FROBENIUS)
    elif involutive:
        text = generality(characters)
    else:
        notes.append(PROLONGATION_REQUIRED)
        tower = prolong_to_involution(prolonged, flags, max(max_prolongations - 1, 0))
        dims = (tableau.dimension,) + tower.dimensions
        if tower.level is None:
            prolongations = None
            prolonged_characters = tower.characters
            text = PROLONGATION_REQUIRED
            notes.append(f"not involutive after {max_prolongations} prolongations")
        else:
            prolongations = tower.level + 1
            prolonged_characters = tower.characters
            text = FROBENIUS if tower.finite_type else generality(tower.characters)
            notes.append(f"involutive after {prolongations} prolongation{'s' if prolongations != 1 else ''}")
    if isotropy_dim and not C.is_zero():
        notes.append(f"Cauchy reduction not performed (isotropy algebra of dimension {isotropy_dim})")
    report = TableauReport(
        kernel_dim=kernel,
        characters=characters,
        character_sum=total,
        prolongation_dim=prolonged.dimension,
        involutive=involutive,
        generality=text,
        isotropy_dim=isotropy_dim,
        free_shear_dim=n * n * (n + 1) // 2,
        flag_votes=votes,
        prolongations=prolongations,
        prolonged_characters=prolonged_characters,
        prolongation_dims=dims,
        tabulated=TABULATED_GENERALITY.get((n, label)) if label else None,
        notes=tuple(notes),
    )
    if report.agrees_with_tabulated is False:
        logger.warning("computed generality %r differs from the tabulated %r", report.generality, report.tabulated)
    return report
