import json
from pathlib import Path

import numpy as np
import pytest

from lagrangian_cubics.experiments.run_experiment import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_USAGE,
    main,
    parse_vector,
)
from lagrangian_cubics.lc_core.dynamics import QuadraticHamiltonian
from lagrangian_cubics.lc_core.errors import InvalidInputError


def _run(capsys: pytest.CaptureFixture[str], *argv: str) -> dict:
    assert main(list(argv)) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == argv[0]
    return report["result"]


def test_classify_fermat_fixture(capsys: pytest.CaptureFixture[str]) -> None:
    result = _run(capsys, "classify", "--fixture", "fermat")
    assert result["family"] == "ternary"
    assert result["label"] == "nonsingular"
    assert result["sigma"] == pytest.approx(0.0, abs=1e-8)
    assert result["circuits"] == 1


def test_classify_binary_expression(capsys: pytest.CaptureFixture[str]) -> None:
    result = _run(capsys, "classify", "--expr", "x**3 - x*y**2")
    assert result["family"] == "binary"
    assert result["label"] == "three_distinct_real_factors"
    assert result["stable"]
    assert not result["near_degenerate"]


def test_classify_record_from_a_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = tmp_path / "cubic.json"
    path.write_text(json.dumps({"expr": "x**2*y", "dim": 3}))
    result = _run(capsys, "classify", "--ternary", str(path))
    assert result["label"] == "square_times_indep_linear"


def test_cartan_test_on_hesse_fixture(capsys: pytest.CaptureFixture[str]) -> None:
    result = _run(capsys, "tableau", "--cartan-test", "--fixture", "hesse_sigma1")
    assert result["generality"] == "3 functions of 2 variables"
    assert result["involutive"]


def test_kernel_dimension_of_fermat(capsys: pytest.CaptureFixture[str]) -> None:
    result = _run(capsys, "tableau", "--kernel-dim", "--fixture", "fermat")
    assert result == {"kernel_dim": 12, "isotropy_dim": 0}


def test_invariant_of_the_clifford_torus(capsys: pytest.CaptureFixture[str]) -> None:
    result = _run(capsys, "invariant", "--fixture", "clifford2")
    assert result["class"]["label"] == "linear_times_irred_quadratic"
    assert result["at"] == [0.0, 0.0]


def test_bracket_of_records(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    f, g = tmp_path / "f.json", tmp_path / "g.json"
    f.write_text(json.dumps(QuadraticHamiltonian.from_polynomial("p1", 1).as_record()))
    g.write_text(json.dumps(QuadraticHamiltonian.from_polynomial("q1", 1).as_record()))
    result = _run(capsys, "bracket", str(f), str(g), "--check")
    assert result["bracket"]["c"] == "1"
    assert result["oracle_difference"] == 0.0


def test_flow_of_the_harmonic_oscillator(capsys: pytest.CaptureFixture[str]) -> None:
    result = _run(capsys, "flow", "--expr", "(q1**2 + p1**2)/2", "--n", "1", "--t", str(np.pi), "--x0", "1,0")
    assert result["point"] == pytest.approx([-1.0, 0.0], abs=1e-12)


def test_curve_kinds(capsys: pytest.CaptureFixture[str]) -> None:
    result = _run(capsys, "curve", "--A", "0", "--B", "-1", "--C", "1")
    assert result["kind"] == "ellipse"
    assert result["period"] == pytest.approx(2 * np.pi)
    assert result["points"][0] == pytest.approx(result["points"][-1], abs=1e-9)
    assert _run(capsys, "curve", "--A", "1", "--B", "1", "--C", "-1")["kind"] == "parabola"


def test_extreme_verdict(capsys: pytest.CaptureFixture[str]) -> None:
    result = _run(
        capsys, "extreme", "--fixture", "binary_linear_times_irred_quadratic", "--grid-density", "200"
    )
    assert result["kind"] == "extreme"


def test_dims(capsys: pytest.CaptureFixture[str]) -> None:
    result = _run(capsys, "dims", "--n", "3", "--k", "3")
    assert result["grassmannian"] == {"k": 3, "n": 3, "linear": 6, "affine": 9}
    assert result["monomial_dimension"] == 10
    assert result["cubic_moduli_dimension"] == 1
    assert result["discriminant_degree"] == 12


def test_runs_are_deterministic(capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["experiment", "round-trip", "--family", "binary", "--trials", "2", "--seed", "7"]
    assert main(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert main(argv) == EXIT_OK
    second = capsys.readouterr().out
    assert first == second
    report = json.loads(first)
    assert report["manifest"]["seed"] == 7
    assert report["result"]["trials"] == 10
    assert "wall_time" not in report["manifest"]


def test_experiment_reads_a_yaml_config(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = tmp_path / "round_trip.yaml"
    config.write_text("family: binary\nmode: float\ntrials: 1\nseed: 3\n")
    assert main(["experiment", "round-trip", "--config", str(config), "--trials", "2"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["result"]["mode"] == "float"
    assert report["result"]["trials"] == 10
    assert report["manifest"]["seed"] == 3
    assert "config" in report["manifest"]["inputs"]


def test_text_output_and_save(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["classify", "--fixture", "fermat", "--output", "text"]) == EXIT_OK
    assert "label: nonsingular" in capsys.readouterr().out
    target = tmp_path / "report.json"
    assert main(["dims", "--n", "2", "--save", str(target)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["result"]["cubic_moduli_dimension"] == 0
    assert main(["dims", "--n", "2", "--timing"]) == EXIT_OK
    assert "wall_time" in json.loads(capsys.readouterr().out)["manifest"]


def test_exit_codes(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["transmogrify"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE
    assert main(["classify", "--expr", "x**2*y**2"]) == EXIT_INVALID
    assert main(["classify", "--fixture", "octahedron"]) == EXIT_INVALID
    assert main(["flow", "--expr", "q1**3", "--n", "1", "--t", "1", "--x0", "0,0"]) == EXIT_INVALID
    err = capsys.readouterr().err
    assert "invalid input" in err


def test_parse_vector() -> None:
    assert parse_vector("0, 1/2, 0.25") == [0, 0.5, 0.25]
    with pytest.raises(InvalidInputError):
        parse_vector("1,,2")
