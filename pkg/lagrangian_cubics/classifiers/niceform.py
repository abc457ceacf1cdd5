"""Reduction of homogeneous forms to nice form and the conjecture experiment."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations, product
import logging
from math import factorial
from typing import Any, Optional

import numpy as np
from scipy.stats import ortho_group

from ..lc_core import linalg
from ..lc_core.errors import InvalidInputError
from ..lc_core.forms import FLOAT, HomogeneousForm, LinearTransform, change_variables, monomials, polarize
from ..lc_core.records import form_to_record
from ..lc_core.utils import make_rng, spawn_rngs
from . import binary, ternary

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
NEWTON_TOL = 1e-10
MAX_ITERATIONS = 200
DEFAULT_RESTARTS = 50
ARMIJO_C = 1e-4
KEY_DECIMALS = 6
SINGULARITY_PROXY_TOL = 1e-3


def _vertex(n: int, d: int, i: int) -> tuple[int, ...]:
    exp = [0] * n
    exp[i] = d
    return tuple(exp)


def _adjacent(n: int, d: int, i: int, j: int) -> tuple[int, ...]:
    exp = [0] * n
    exp[i] = d - 1
    exp[j] = 1
    return tuple(exp)


def is_nice_form(F: HomogeneousForm, tol: float = DEFAULT_TOL) -> bool:
    """Vertex coefficients are ``+-1`` and every ``x_i^(d-1) x_j`` coefficient vanishes."""

    n, d = F.dim, F.degree
    for i in range(n):
        if abs(abs(float(F.coefficient(_vertex(n, d, i)))) - 1.0) > tol:
            return False
        for j in range(n):
            if j != i and abs(float(F.coefficient(_adjacent(n, d, i, j)))) > tol:
                return False
    return True


@dataclass(frozen=True)
class NiceFormResult:
    success: bool
    transform: LinearTransform
    normal_form: HomogeneousForm
    residual: float
    solution_class: tuple[float, ...]
    solution_class_unsigned: tuple[float, ...]
    iterations: int = 0


class _NiceSystem:
    """The ``n^2`` nice-form conditions on the columns ``t_i`` of ``T``.

    ``F(t_i)^2 - 1 = 0`` and ``grad F(t_i) . t_j = 0`` for ``i != j``.
    """

    def __init__(self, F: HomogeneousForm) -> None:
        self.n = F.dim
        self.d = F.degree
        self.tensor = linalg.as_float_array(polarize(F.as_float()).entries)

    def _contract(self, t: np.ndarray, times: int) -> np.ndarray:
        out = self.tensor
        for _ in range(times):
            out = np.tensordot(t, out, axes=([0], [0]))
        return out

    def value(self, t: np.ndarray) -> float:
        return float(self._contract(t, self.d)) / factorial(self.d)

    def gradient(self, t: np.ndarray) -> np.ndarray:
        return self._contract(t, self.d - 1) / factorial(self.d - 1)

    def hessian(self, t: np.ndarray) -> np.ndarray:
        return self._contract(t, self.d - 2) / factorial(self.d - 2)

    def residuals(self, T: np.ndarray) -> np.ndarray:
        n = self.n
        out = np.empty(n * n)
        k = 0
        for i in range(n):
            t_i = T[:, i]
            out[k] = self.value(t_i) ** 2 - 1.0
            k += 1
            grad = self.gradient(t_i)
            for j in range(n):
                if j != i:
                    out[k] = grad @ T[:, j]
                    k += 1
        return out

    def jacobian(self, T: np.ndarray) -> np.ndarray:
        n = self.n
        J = np.zeros((n * n, n * n))
        k = 0
        for i in range(n):
            t_i = T[:, i]
            grad = self.gradient(t_i)
            hess = self.hessian(t_i)
            # unknowns are T.ravel(order="F"): column i occupies [i*n, (i+1)*n)
            J[k, i * n : (i + 1) * n] = 2.0 * self.value(t_i) * grad
            k += 1
            for j in range(n):
                if j != i:
                    J[k, i * n : (i + 1) * n] = hess @ T[:, j]
                    J[k, j * n : (j + 1) * n] = grad
                    k += 1
        return J


def _newton(system: _NiceSystem, T0: np.ndarray) -> tuple[np.ndarray, float, int]:
    """Damped Newton with Armijo backtracking on ``0.5 |r|^2``."""

    n = system.n
    x = T0.ravel(order="F")
    r = system.residuals(x.reshape(n, n, order="F"))
    merit = 0.5 * float(r @ r)
    iteration = 0
    for iteration in range(1, MAX_ITERATIONS + 1):
        if float(np.max(np.abs(r))) < NEWTON_TOL:
            break
        J = system.jacobian(x.reshape(n, n, order="F"))
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        alpha = 1.0
        while alpha > 1e-10:
            trial = x + alpha * step
            r_trial = system.residuals(trial.reshape(n, n, order="F"))
            merit_trial = 0.5 * float(r_trial @ r_trial)
            if merit_trial <= (1.0 - 2.0 * ARMIJO_C * alpha) * merit:
                break
            alpha *= 0.5
        else:
            logger.debug("line search stalled at iteration %d, merit %.3e", iteration, merit)
            break
        x, r, merit = trial, r_trial, merit_trial
    return x.reshape(n, n, order="F"), float(np.max(np.abs(r))), iteration


def _class_key(G: HomogeneousForm, signs: bool) -> tuple[float, ...]:
    """Lexicographically least coefficient vector over permutations (and sign flips)."""

    n, d = G.dim, G.degree
    basis = monomials(n, d)
    coeffs = {exp: float(G.coefficient(exp)) for exp in basis}
    flips = list(product((1, -1), repeat=n)) if signs else [(1,) * n]
    best: Optional[tuple[float, ...]] = None
    for perm in permutations(range(n)):
        for flip in flips:
            key = []
            for exp in basis:
                # exponent seen after renaming variable perm[i] -> i
                source = tuple(exp[perm.index(i)] for i in range(n))
                sign = np.prod([flip[i] ** exp[i] for i in range(n)])
                key.append(round(float(sign * coeffs[source]), KEY_DECIMALS) + 0.0)
            candidate = tuple(key)
            if best is None or candidate < best:
                best = candidate
    return best if best is not None else ()


def _start(system: _NiceSystem, rng: np.random.Generator) -> np.ndarray:
    n, d = system.n, system.d
    Q = ortho_group.rvs(n, random_state=rng) if n > 1 else np.array([[1.0]])
    size = np.sqrt(np.mean([system.value(Q[:, i]) ** 2 for i in range(n)]))
    if size > 0:
        Q = Q * size ** (-1.0 / d)
    return Q


def find_nice_form(
    F: HomogeneousForm,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: Optional[int] = 0,
    rng: Optional[np.random.Generator] = None,
) -> list[NiceFormResult]:
    """Search for transforms ``T`` with ``F o T`` in nice form.

    Parameters
    ----------
    F:
        Homogeneous form of degree at least 2 (degree 2 is a sanity mode).
    restarts:
        Number of random orthogonal starting transforms.
    tol:
        Acceptance tolerance for :func:`is_nice_form`.
    seed, rng:
        Randomness for the starts; ``rng`` wins when both are given.

    Returns
    -------
    list of NiceFormResult
        One result per solution class modulo permutations and sign flips,
        sorted by class key; empty when no start converged.
    """

    if F.degree < 2:
        raise InvalidInputError("nice forms need degree >= 2")
    if F.is_zero():
        return []
    rng = rng if rng is not None else make_rng(seed)
    system = _NiceSystem(F)
    found: dict[tuple[float, ...], NiceFormResult] = {}
    for attempt in range(restarts):
        T, residual, iterations = _newton(system, _start(system, rng))
        if residual > NEWTON_TOL * 1e2 or abs(np.linalg.det(T)) < 1e-10:
            logger.debug("start %d did not converge (residual %.3e)", attempt, residual)
            continue
        transform = LinearTransform(T)
        G = change_variables(F.as_float(), transform)
        if not is_nice_form(G, tol):
            continue
        key = _class_key(G, signs=True)
        previous = found.get(key)
        result = NiceFormResult(
            success=True,
            transform=transform,
            normal_form=G,
            residual=residual,
            solution_class=key,
            solution_class_unsigned=_class_key(G, signs=False),
            iterations=iterations,
        )
        # prefer the representative closest to the identity
        if previous is None or _distance_to_identity(T) < _distance_to_identity(
            linalg.as_float_array(previous.transform.matrix)
        ):
            found[key] = result
    return [found[key] for key in sorted(found)]


def _distance_to_identity(T: np.ndarray) -> float:
    n = T.shape[0]
    return min(float(np.linalg.norm(T[:, list(p)] - np.eye(n))) for p in permutations(range(n)))


# -- conjecture experiment ---------------------------------------------------------------


def random_form(n: int, d: int, rng: np.random.Generator) -> HomogeneousForm:
    """Standard normal coefficient on every monomial; degree 2 draws a positive-definite form."""

    if d == 2:
        A = rng.normal(size=(n, n))
        S = A @ A.T + np.eye(n)
        coeffs = {}
        for exp in monomials(n, 2):
            idx = [i for i, e in enumerate(exp) for _ in range(e)]
            coeffs[exp] = S[idx[0], idx[1]] * (1.0 if idx[0] == idx[1] else 2.0)
        return HomogeneousForm(n, 2, coeffs, FLOAT)
    return HomogeneousForm(n, d, {exp: float(rng.normal()) for exp in monomials(n, d)}, FLOAT)


def gradient_proxy(F: HomogeneousForm, rng: np.random.Generator, samples: int = 4000) -> float:
    """Minimum of ``|grad F|`` over random unit vectors, relative to the coefficient size."""

    points = rng.normal(size=(samples, F.dim))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    system = _NiceSystem(F)
    values = [float(np.linalg.norm(system.gradient(p))) for p in points]
    return min(values) / max(F.max_abs(), 1e-300)


def is_nonsingular(F: HomogeneousForm, rng: np.random.Generator) -> bool:
    """Exact discriminant tests for cubics in 2 or 3 variables, a real-gradient proxy otherwise."""

    if F.degree == 3 and F.dim in (2, 3):
        return not ternary.is_singular(F)
    if F.degree == 2:
        return abs(np.linalg.det(_NiceSystem(F).hessian(np.zeros(F.dim)))) > 1e-12
    return gradient_proxy(F, rng) > SINGULARITY_PROXY_TOL


@dataclass
class TrialOutcome:
    index: int
    nonsingular: bool
    success: bool = False
    classes: int = 0
    classes_unsigned: int = 0
    stratum: Optional[str] = None
    form: dict[str, Any] = field(default_factory=dict)


def _run_trial(args: tuple[int, int, int, np.random.Generator, int, float]) -> TrialOutcome:
    index, n, d, rng, restarts, tol = args
    F = random_form(n, d, rng)
    record = form_to_record(F)
    if not is_nonsingular(F, rng):
        return TrialOutcome(index, nonsingular=False, form=record)
    stratum = None
    if n == 2 and d == 3:
        stratum = "delta_positive" if float(binary.binary_discriminant(F)) > 0 else "delta_negative"
    results = find_nice_form(F, restarts=restarts, tol=tol, rng=rng)
    return TrialOutcome(
        index,
        nonsingular=True,
        success=bool(results),
        classes=len(results),
        classes_unsigned=len({r.solution_class_unsigned for r in results}),
        stratum=stratum,
        form=record,
    )


@dataclass(frozen=True)
class ConjectureReport:
    n: int
    d: int
    trials: int
    seed: int
    restarts: int
    nonsingular: int
    successes: int
    success_rate: float
    class_histogram: dict[int, int]
    class_histogram_unsigned: dict[int, int]
    strata: dict[str, dict[str, Any]]
    failures: list[dict[str, Any]]

    @property
    def modal_class_count(self) -> Optional[int]:
        if not self.class_histogram:
            return None
        return max(sorted(self.class_histogram), key=lambda k: self.class_histogram[k])

    def as_record(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "d": self.d,
            "trials": self.trials,
            "seed": self.seed,
            "restarts": self.restarts,
            "nonsingular": self.nonsingular,
            "successes": self.successes,
            "success_rate": self.success_rate,
            "class_histogram": {str(k): v for k, v in sorted(self.class_histogram.items())},
            "class_histogram_unsigned": {str(k): v for k, v in sorted(self.class_histogram_unsigned.items())},
            "strata": self.strata,
            "failures": self.failures,
        }


def conjecture_experiment(
    n: int,
    d: int,
    trials: int,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> ConjectureReport:
    """Sample random nonsingular forms and try to put each in nice form.

    Every trial owns a generator spawned from ``seed``; results are merged by
    trial index so the report does not depend on ``workers``.
    """

    if n < 2 or d < 2:
        raise InvalidInputError("conjecture experiment needs n >= 2 and d >= 2")
    rngs = spawn_rngs(seed, trials)
    jobs = [(i, n, d, rngs[i], restarts, tol) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_trial, jobs))
    else:
        outcomes = [_run_trial(job) for job in jobs]
    outcomes.sort(key=lambda o: o.index)

    tried = [o for o in outcomes if o.nonsingular]
    successes = [o for o in tried if o.success]
    histogram = Counter(o.classes for o in successes)
    histogram_unsigned = Counter(o.classes_unsigned for o in successes)
    strata: dict[str, dict[str, Any]] = {}
    for name in sorted({o.stratum for o in tried if o.stratum}):
        members = [o for o in tried if o.stratum == name]
        wins = sum(1 for o in members if o.success)
        strata[name] = {"trials": len(members), "successes": wins, "success_rate": wins / len(members)}
    report = ConjectureReport(
        n=n,
        d=d,
        trials=trials,
        seed=seed,
        restarts=restarts,
        nonsingular=len(tried),
        successes=len(successes),
        success_rate=len(successes) / len(tried) if tried else 0.0,
        class_histogram=dict(histogram),
        class_histogram_unsigned=dict(histogram_unsigned),
        strata=strata,
        failures=[o.form for o in tried if not o.success],
    )
    logger.info(
        "nice-form experiment n=%d d=%d: %d/%d nonsingular forms reduced",
        n,
        d,
        report.successes,
        report.nonsingular,
    )
    return report
