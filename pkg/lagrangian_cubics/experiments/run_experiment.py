"""Command line interface to the classifiers, the tableau analysis and the dynamics.

Every subcommand reads JSON records (from files, stdin or a built-in fixture)
and writes one JSON report.  Randomized procedures take ``--seed`` and the
report embeds a :class:`RunManifest`, so identical invocations produce
identical bytes.  Experiments optionally read a YAML configuration whose
keys mirror the command line flags.
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
import sys
import time
from typing import Any, Callable, Optional, Sequence

import numpy as np
import yaml

from ..classifiers import binary, extremes, niceform, plane_curves, ternary
from ..classifiers.binary import BinaryLabel
from ..classifiers.normal_forms import get_fixture
from ..classifiers.ternary import TernaryLabel
from ..lc_core import dynamics, tableau
from ..lc_core.errors import InvalidInputError, NonConvergenceError
from ..lc_core.forms import (
    HomogeneousForm,
    LinearTransform,
    change_variables,
    cubic_moduli_dimension,
    monomial_dimension,
    parse_form,
    polarize,
)
from ..lc_core.genfun import cubic_invariant, jet_from_patch
from ..lc_core.records import (
    SCHEMA_VERSION,
    dumps,
    form_from_record,
    form_to_record,
    patch_from_record,
    read_json,
    scalar_from_json,
)
from ..lc_core.utils import make_rng, random_invertible_rational
from .analyze_results import (
    binary_class_record,
    circuit_agreement,
    label_histogram,
    round_trip_summary,
    ternary_class_record,
)
from .manifest import RunManifest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3
EXIT_USAGE = 64

SUBCOMMANDS = ("classify", "invariant", "tableau", "bracket", "flow", "curve", "extreme", "dims", "experiment")
EXPERIMENTS = ("nice-conjecture", "round-trip", "circuits-scan")

# argparse marker for an input flag given without a path
_FROM_SELECTOR = ""

EXPERIMENT_DEFAULTS: dict[str, Any] = {
    "n": 2,
    "d": 3,
    "trials": 200,
    "restarts": niceform.DEFAULT_RESTARTS,
    "workers": 1,
    "family": "binary",
    "mode": "exact",
    "sigma_min": -3.0,
    "sigma_max": 3.0,
    "steps": 25,
    "lines": 360,
}


# -- input helpers ----------------------------------------------------------------------


def parse_vector(text: str) -> list[Any]:
    """``"0,1/2,0.25"`` -> list of scalars, exact rationals wherever the text parses as one."""

    values: list[Any] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise InvalidInputError(f"empty component in vector {text!r}")
        try:
            values.append(scalar_from_json(item))
        except InvalidInputError:
            try:
                values.append(float(item))
            except ValueError as exc:
                raise InvalidInputError(f"cannot parse vector component {item!r}") from exc
    return values


def _scalar_arg(text: str) -> Any:
    return parse_vector(text)[0]


def _load_document(path: Optional[str], manifest: RunManifest, name: str) -> Any:
    document = read_json(path if path else "-")
    manifest.add_input(name, document)
    return document


def load_form(args: argparse.Namespace, manifest: RunManifest, path: Optional[str] = None) -> HomogeneousForm:
    """Form from ``--fixture``, ``--expr`` or a record path (stdin when none is given)."""

    if getattr(args, "fixture", None):
        fixture = get_fixture(args.fixture)
        manifest.add_input("fixture", fixture.record)
        return fixture.form()
    if getattr(args, "expr", None):
        manifest.add_input("expr", args.expr)
        return parse_form(args.expr, getattr(args, "dim", None))
    return form_from_record(_load_document(path, manifest, "form"))


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _load_config(path: Optional[Path]) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        config = yaml.safe_load(path.read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise InvalidInputError(f"cannot read configuration {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise InvalidInputError("configuration must be a mapping")
    return config


def _setting(args: argparse.Namespace, config: dict[str, Any], key: str) -> Any:
    value = getattr(args, key, None)
    if value is not None:
        return value
    return config.get(key.replace("_", "-"), config.get(key, EXPERIMENT_DEFAULTS[key]))


# -- subcommands ------------------------------------------------------------------------


def run_classify(args: argparse.Namespace, manifest: RunManifest) -> dict[str, Any]:
    path = args.binary if args.binary is not None else args.ternary
    F = load_form(args, manifest, path or None)
    if F.degree != 3:
        raise InvalidInputError(f"classify expects a cubic, got degree {F.degree}")
    if args.binary is not None or (args.ternary is None and F.dim == 2):
        return {"family": "binary", **binary_class_record(binary.classify_binary(F))}
    if F.dim != 3:
        raise InvalidInputError(f"classify handles binary and ternary cubics, got dim {F.dim}")
    return {"family": "ternary", **ternary_class_record(ternary.classify_ternary(F))}


def run_invariant(args: argparse.Namespace, manifest: RunManifest) -> dict[str, Any]:
    if args.fixture:
        fixture = get_fixture(args.fixture)
        manifest.add_input("fixture", fixture.record)
        patch = fixture.patch()
    else:
        record = _load_document(args.patch or None, manifest, "patch")
        patch = patch_from_record(record)
        if args.at is None and "at" in record:
            args.at = ",".join(str(v) for v in record["at"])
    q0 = parse_vector(args.at) if args.at else [0] * patch.dim
    F = cubic_invariant(jet_from_patch(patch, q0))
    report: dict[str, Any] = {"patch": patch.name, "at": [float(v) for v in q0], "cubic": form_to_record(F)}
    if F.dim == 2:
        report["class"] = binary_class_record(binary.classify_binary(F))
    elif F.dim == 3:
        report["class"] = ternary_class_record(ternary.classify_ternary(F))
    return report


def run_tableau(args: argparse.Namespace, manifest: RunManifest) -> dict[str, Any]:
    path = args.cartan_test if args.cartan_test is not None else args.kernel_dim
    F = load_form(args, manifest, path or None)
    C = polarize(F)
    if args.cartan_test is None:
        return {"kernel_dim": tableau.kernel_dimension(C), "isotropy_dim": len(tableau.isotropy_algebra(C))}
    flags = [tableau.coordinate_flag(C.dim)] if args.flag == "coordinate" else None
    label = None
    if C.dim in (2, 3) and F.is_exact:
        if C.dim == 2:
            label = binary.classify_binary(F, witness=False).label.value
        else:
            label = ternary.classify_ternary(F, witness=False).label.value
    return tableau.cartan_test(C, flags=flags, seed=args.seed, label=label).as_record()


def _load_hamiltonian(path: str, manifest: RunManifest, name: str) -> dynamics.QuadraticHamiltonian:
    return dynamics.QuadraticHamiltonian.from_record(_load_document(path, manifest, name))


def run_bracket(args: argparse.Namespace, manifest: RunManifest) -> dict[str, Any]:
    f = _load_hamiltonian(args.f, manifest, "f")
    g = _load_hamiltonian(args.g, manifest, "g")
    result = dynamics.poisson_bracket(f, g)
    report: dict[str, Any] = {"bracket": result.as_record()}
    if args.check:
        report["oracle_difference"] = result.max_abs_difference(dynamics.bracket_oracle(f, g))
    return report


def run_flow(args: argparse.Namespace, manifest: RunManifest) -> dict[str, Any]:
    if args.H:
        f = _load_hamiltonian(args.H, manifest, "H")
    elif args.expr:
        if args.n is None:
            raise InvalidInputError("--expr needs --n")
        manifest.add_input("expr", args.expr)
        f = dynamics.QuadraticHamiltonian.from_polynomial(args.expr, args.n)
    else:
        raise InvalidInputError("flow needs --H or --expr")
    x0 = [float(v) for v in parse_vector(args.x0)]
    point = dynamics.flow(f, args.t, x0)
    return {"hamiltonian": f.as_record(), "t": args.t, "x0": x0, "point": [float(v) for v in point]}


def run_curve(args: argparse.Namespace, manifest: RunManifest) -> dict[str, Any]:
    x0 = [float(v) for v in parse_vector(args.x0)]
    curve = dynamics.homogeneous_curve(args.A, args.B, args.C, x0)
    ts = np.linspace(0.0, args.t_max, args.samples)
    return {
        "kind": curve.kind.value,
        "det": float(curve.det),
        "normalized_det": curve.normalized_det,
        "period": curve.period,
        "t": [float(t) for t in ts],
        "points": [[float(v) for v in p] for p in curve.sample(ts)],
    }


def run_extreme(args: argparse.Namespace, manifest: RunManifest) -> dict[str, Any]:
    F = load_form(args, manifest, args.form or None)
    C = extremes.hesse_slice(F) if args.hesse_slice else polarize(F)
    verdict = extremes.extreme_type(C, grid_density=args.grid_density, polish_iters=args.polish_iters)
    return verdict.as_record()


def run_dims(args: argparse.Namespace, manifest: RunManifest) -> dict[str, Any]:
    report: dict[str, Any] = {}
    if args.k is not None:
        linear, affine = dynamics.lagrangian_grassmannian_dims(args.k, args.n)
        report["grassmannian"] = {"k": args.k, "n": args.n, "linear": linear, "affine": affine}
    report["monomial_dimension"] = monomial_dimension(args.n, args.d)
    report["cubic_moduli_dimension"] = cubic_moduli_dimension(args.n)
    report["discriminant_degree"] = ternary.discriminant_degree(args.n)
    return report


# -- experiments ------------------------------------------------------------------------


def _conjugate(F: HomogeneousForm, rng: np.random.Generator, mode: str) -> HomogeneousForm:
    T = LinearTransform(random_invertible_rational(F.dim, rng))
    G = change_variables(F, T)
    return G if mode == "exact" else G.as_float()


def round_trip(family: str, trials: int, seed: int, mode: str) -> dict[str, Any]:
    """Classify random conjugates of every normal form and compare labels."""

    rng = make_rng(seed)
    if family == "binary":
        cases: list[tuple[str, HomogeneousForm, Callable[[HomogeneousForm], Any]]] = [
            (label.value, binary.normal_form(label), lambda F: binary.classify_binary(F, witness=False))
            for label in BinaryLabel
        ]
    elif family == "ternary":
        cases = [
            (label.value, ternary.normal_form(label, 1), lambda F: ternary.classify_ternary(F, witness=False))
            for label in TernaryLabel
        ]
    else:
        raise InvalidInputError(f"unknown family {family!r}")
    if mode not in ("exact", "float"):
        raise InvalidInputError(f"unknown mode {mode!r}")
    rows = []
    for label, F, classify in cases:
        for _ in range(trials):
            result = classify(_conjugate(F, rng, mode))
            rows.append({"label": label, "recovered": result.label.value, "near_degenerate": result.near_degenerate})
        logger.info("round trip %s done", label)
    summary = round_trip_summary(rows)
    summary.update({"family": family, "mode": mode, "seed": seed})
    summary["recovered"] = label_histogram(row["recovered"] for row in rows)
    return summary


def circuits_scan(sigma_min: float, sigma_max: float, steps: int, seed: int, lines: int) -> dict[str, Any]:
    """Hesse forms across a sigma range, conjugated at random, counted two ways."""

    rng = make_rng(seed)
    rows = []
    for sigma in np.linspace(sigma_min, sigma_max, steps):
        if abs(sigma - float(ternary.SIGMA_SINGULAR)) < 1e-3:
            continue
        T = LinearTransform(random_invertible_rational(3, rng)).as_float()
        F = change_variables(ternary.hesse_form(float(sigma)), T)
        rows.append(
            {
                "sigma": float(sigma),
                "expected": 2 if sigma < float(ternary.SIGMA_SINGULAR) else 1,
                "weierstrass": ternary.circuits(F),
                "sampled": plane_curves.count_circuits_by_sampling(F, lines=lines, seed=seed),
            }
        )
    return {"rows": rows, **circuit_agreement(rows)}


def run_experiment_command(args: argparse.Namespace, manifest: RunManifest) -> dict[str, Any]:
    config = _load_config(args.config)
    if args.config is not None:
        manifest.add_input("config", config)
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    manifest.seed = seed
    if args.name == "nice-conjecture":
        report = niceform.conjecture_experiment(
            int(_setting(args, config, "n")),
            int(_setting(args, config, "d")),
            int(_setting(args, config, "trials")),
            seed=seed,
            restarts=int(_setting(args, config, "restarts")),
            workers=int(_setting(args, config, "workers")),
        )
        return report.as_record()
    if args.name == "round-trip":
        return round_trip(
            str(_setting(args, config, "family")),
            int(_setting(args, config, "trials")),
            seed,
            str(_setting(args, config, "mode")),
        )
    return circuits_scan(
        float(_setting(args, config, "sigma_min")),
        float(_setting(args, config, "sigma_max")),
        int(_setting(args, config, "steps")),
        seed,
        int(_setting(args, config, "lines")),
    )


# -- parser and dispatch ----------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Seed for randomized procedures (default 0)")
    common.add_argument("--output", choices=("json", "text"), default="json", help="Report format")
    common.add_argument("--save", type=Path, help="Optional path to save the report instead of printing it")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG on stderr")
    common.add_argument("--timing", action="store_true", help="Record wall time in the manifest")
    return common


def _form_selectors(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--fixture", help="Built-in named input")
    parser.add_argument("--expr", help="Inline form such as 'x**3/6 + y**3/6'")
    parser.add_argument("--dim", type=int, help="Number of variables for --expr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lagrangian_cubics",
        description="Cubic form invariants of Lagrangian submanifolds",
    )
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")
    common = _common_parser()

    classify = sub.add_parser("classify", parents=[common], help="Classify a binary or ternary cubic")
    which = classify.add_mutually_exclusive_group()
    which.add_argument("--binary", nargs="?", const=_FROM_SELECTOR, help="Binary cubic record")
    which.add_argument("--ternary", nargs="?", const=_FROM_SELECTOR, help="Ternary cubic record")
    _form_selectors(classify)
    classify.set_defaults(handler=run_classify)

    invariant = sub.add_parser("invariant", parents=[common], help="Cubic invariant of a patch at a point")
    invariant.add_argument("--patch", nargs="?", const=_FROM_SELECTOR, default=None, help="Patch record")
    invariant.add_argument("--fixture", help="Built-in named patch or form")
    invariant.add_argument("--at", help="Base point, comma separated")
    invariant.set_defaults(handler=run_invariant)

    tab = sub.add_parser("tableau", parents=[common], help="Integral elements and Cartan's test")
    mode = tab.add_mutually_exclusive_group(required=True)
    mode.add_argument("--kernel-dim", nargs="?", const=_FROM_SELECTOR, help="Dimension of {A : AC = 0}")
    mode.add_argument("--cartan-test", nargs="?", const=_FROM_SELECTOR, help="Full tableau report")
    tab.add_argument("--flag", choices=("random", "coordinate"), default="random", help="Flags for the characters")
    _form_selectors(tab)
    tab.set_defaults(handler=run_tableau)

    bracket = sub.add_parser("bracket", parents=[common], help="Poisson bracket of two Hamiltonian records")
    bracket.add_argument("f")
    bracket.add_argument("g")
    bracket.add_argument("--check", action="store_true", help="Compare with symbolic differentiation")
    bracket.set_defaults(handler=run_bracket)

    flow = sub.add_parser("flow", parents=[common], help="Time-t flow of a quadratic Hamiltonian")
    flow.add_argument("--H", help="Hamiltonian record")
    flow.add_argument("--expr", help="Polynomial in q1..qn, p1..pn of degree at most two")
    flow.add_argument("--n", type=int)
    flow.add_argument("--t", type=float, required=True)
    flow.add_argument("--x0", required=True, help="Start point, comma separated")
    flow.set_defaults(handler=run_flow)

    curve = sub.add_parser("curve", parents=[common], help="Homogeneous Lagrangian curve in the plane")
    for name in ("A", "B", "C"):
        curve.add_argument(f"--{name}", type=_scalar_arg, required=True)
    curve.add_argument("--x0", default="0,0")
    curve.add_argument("--samples", type=int, default=9)
    curve.add_argument("--t-max", type=float, default=2 * np.pi)
    curve.set_defaults(handler=run_curve)

    extreme = sub.add_parser("extreme", parents=[common], help="Extreme-point type of a cubic")
    extreme.add_argument("form", nargs="?", default=None, help="Cubic form record")
    extreme.add_argument("--hesse-slice", action="store_true", help="Hesse-normalize a ternary cubic and drop z")
    extreme.add_argument("--grid-density", type=int, default=extremes.GRID_DENSITY)
    extreme.add_argument("--polish-iters", type=int, default=extremes.POLISH_ITERATIONS)
    _form_selectors(extreme)
    extreme.set_defaults(handler=run_extreme)

    dims = sub.add_parser("dims", parents=[common], help="Dimension counts")
    dims.add_argument("--k", type=int)
    dims.add_argument("--n", type=int, required=True)
    dims.add_argument("--d", type=int, default=3)
    dims.set_defaults(handler=run_dims)

    experiment = sub.add_parser("experiment", parents=[common], help="Seeded experiments")
    experiment.add_argument("name", choices=EXPERIMENTS)
    experiment.add_argument("--config", type=Path, help="YAML file; keys mirror the flags below")
    for key in ("n", "d", "trials", "restarts", "workers", "steps", "lines"):
        experiment.add_argument(f"--{key}", type=int, default=None)
    experiment.add_argument("--family", choices=("binary", "ternary"), default=None)
    experiment.add_argument("--mode", choices=("exact", "float"), default=None)
    experiment.add_argument("--sigma-min", type=float, default=None)
    experiment.add_argument("--sigma-max", type=float, default=None)
    experiment.set_defaults(handler=run_experiment_command)
    return parser


def render_text(value: Any, indent: int = 0) -> str:
    """Indented ``key: value`` rendering of a report."""

    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item and not _is_flat_list(item):
                lines.append(f"{pad}{key}:")
                lines.append(render_text(item, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_inline(item)}")
        return "\n".join(lines)
    if isinstance(value, list):
        return "\n".join(f"{pad}- {_inline(item)}" if _is_scalar(item) else render_text(item, indent) for item in value)
    return f"{pad}{_inline(value)}"


def _is_scalar(value: Any) -> bool:
    return not isinstance(value, (dict, list))


def _is_flat_list(value: Any) -> bool:
    return isinstance(value, list) and all(_is_scalar(v) or _is_flat_list(v) for v in value)


def _inline(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_inline(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{}"
    return str(value)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if argv and argv[0] in ("-h", "--help"):
        parser.print_help()
        return EXIT_OK
    if not argv or argv[0] not in SUBCOMMANDS:
        parser.print_usage(sys.stderr)
        print(f"unknown subcommand {argv[0]!r}" if argv else "missing subcommand", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    if args.seed is None and args.command != "experiment":
        args.seed = 0
    manifest = RunManifest.for_argv(argv, args.seed or 0)
    start = time.perf_counter()
    try:
        result = args.handler(args, manifest)
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    if args.timing:
        manifest.wall_time = time.perf_counter() - start
    logger.info("%s finished", args.command)

    summary = {"schema": SCHEMA_VERSION, "command": args.command, "result": result, "manifest": manifest.as_record()}
    text = dumps(summary) if args.output == "json" else render_text(summary)
    if args.save:
        args.save.write_text(text)
    else:
        print(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
