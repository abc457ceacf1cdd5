import numpy as np
import pytest

from lagrangian_cubics.classifiers.niceform import (
    conjecture_experiment,
    find_nice_form,
    is_nice_form,
    is_nonsingular,
    random_form,
)
from lagrangian_cubics.lc_core.errors import InvalidInputError
from lagrangian_cubics.lc_core.forms import HomogeneousForm, change_variables, parse_form


def test_is_nice_form() -> None:
    assert is_nice_form(parse_form("x**3 + y**3"))
    assert is_nice_form(parse_form("x**3 - y**3 + x*y*z + z**3"))
    assert not is_nice_form(parse_form("x**3 + x**2*y + y**3"))
    assert not is_nice_form(parse_form("2*x**3 + y**3"))


def test_nice_forms_of_a_sum_of_cubes() -> None:
    F = parse_form("x**3 + y**3")
    results = find_nice_form(F, restarts=20, seed=0)
    assert results
    for result in results:
        assert result.success
        assert is_nice_form(result.normal_form)
        image = change_variables(F.as_float(), result.transform)
        assert (image - result.normal_form).max_abs() < 1e-9
    assert len({r.solution_class for r in results}) == len(results)


def test_quadratic_sanity_mode() -> None:
    results = find_nice_form(parse_form("x**2 + x*y + y**2"), restarts=10, seed=1)
    assert len(results) == 1
    G = results[0].normal_form
    assert G.coefficient((1, 1)) == pytest.approx(0.0, abs=1e-8)


def test_search_is_reproducible() -> None:
    F = parse_form("x**3 + 2*x*y**2 - y**3/2")
    first = find_nice_form(F, restarts=10, seed=4)
    second = find_nice_form(F, restarts=10, seed=4)
    assert [r.solution_class for r in first] == [r.solution_class for r in second]


def test_degenerate_inputs() -> None:
    assert find_nice_form(HomogeneousForm.zero(2, 3)) == []
    with pytest.raises(InvalidInputError):
        find_nice_form(parse_form("x + y"))


def test_random_forms() -> None:
    rng = np.random.default_rng(0)
    quadratic = random_form(3, 2, rng)
    assert is_nonsingular(quadratic, rng)
    cubic = random_form(2, 3, rng)
    assert cubic.degree == 3 and cubic.dim == 2
    assert not is_nonsingular(parse_form("x**2*y"), rng)


def test_conjecture_experiment_report() -> None:
    report = conjecture_experiment(2, 3, trials=4, seed=1, restarts=10)
    assert report.trials == 4
    assert report.successes <= report.nonsingular <= 4
    assert sum(report.class_histogram.values()) == report.successes
    assert sum(s["trials"] for s in report.strata.values()) == report.nonsingular
    record = report.as_record()
    assert record["seed"] == 1
    assert len(record["failures"]) == report.nonsingular - report.successes


def test_conjecture_experiment_does_not_depend_on_workers() -> None:
    serial = conjecture_experiment(2, 3, trials=3, seed=2, restarts=5)
    parallel = conjecture_experiment(2, 3, trials=3, seed=2, restarts=5, workers=2)
    assert serial.as_record() == parallel.as_record()


def test_conjecture_experiment_needs_a_real_problem() -> None:
    with pytest.raises(InvalidInputError):
        conjecture_experiment(1, 3, trials=1)
