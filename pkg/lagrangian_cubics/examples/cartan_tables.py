"""Run Cartan's test on every binary and ternary normal form."""

from __future__ import annotations

from lagrangian_cubics.classifiers import binary, ternary
from lagrangian_cubics.lc_core.forms import polarize
from lagrangian_cubics.lc_core.tableau import cartan_test


def main() -> None:
    """Print characters, prolongation dimension and generality per orbit."""

    rows = [(2, label.value, binary.normal_form(label)) for label in binary.BinaryLabel]
    rows += [(3, label.value, ternary.normal_form(label, 1)) for label in ternary.TernaryLabel]

    print(f"{'n':>2s}  {'orbit':34s} {'characters':12s} {'A(1)':>5s}  generality")
    print("=" * 100)
    for n, name, F in rows:
        report = cartan_test(polarize(F), label=name)
        characters = ",".join(str(s) for s in report.characters)
        print(f"{n:2d}  {name:34s} {characters:12s} {report.prolongation_dim:5d}  {report.generality}")
        if report.agrees_with_tabulated is False:
            print(f"{'':4s}{'':34s} tabulated: {report.tabulated}")
        for note in report.notes:
            print(f"{'':4s}{'':34s} note: {note}")


if __name__ == "__main__":
    main()
