"""Compute the cubic invariant of Clifford tori and classify it."""

from __future__ import annotations

from fractions import Fraction

from lagrangian_cubics.classifiers.binary import binary_discriminant, classify_binary
from lagrangian_cubics.classifiers.ternary import classify_ternary
from lagrangian_cubics.lc_core.genfun import clifford_torus_jet, cubic_invariant


def main() -> None:
    """Print the cubic term and its orbit for a few radii."""

    print("Clifford torus cubic invariants at q = 0")
    print("=" * 54)
    for radii in ([1, 1], [1, Fraction(1, 2)], [2, 3]):
        F = cubic_invariant(clifford_torus_jet(radii))
        result = classify_binary(F)
        print(
            f"radii {', '.join(str(r) for r in radii):>8s}: {F.to_sympy()}  ->  {result.label.value} "
            f"(discriminant {binary_discriminant(F)})"
        )
    print("-" * 54)
    for radii in ([1, 1, 1], [1, 2, 3]):
        F = cubic_invariant(clifford_torus_jet(radii))
        result = classify_ternary(F)
        print(
            f"radii {', '.join(str(r) for r in radii):>8s}: {result.label.value}, "
            f"sigma = {result.sigma:.6f}, circuits = {result.circuits}"
        )


if __name__ == "__main__":
    main()
