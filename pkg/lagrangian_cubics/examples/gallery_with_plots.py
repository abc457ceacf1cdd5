"""Draw real loci, homogeneous curves, circuit counts and nice-form statistics."""

from __future__ import annotations

from datetime import datetime
import json
from pathlib import Path

import matplotlib.pyplot as plt

from lagrangian_cubics.classifiers import ternary
from lagrangian_cubics.classifiers.niceform import conjecture_experiment
from lagrangian_cubics.experiments.run_experiment import circuits_scan
from lagrangian_cubics.lc_core.dynamics import homogeneous_curve
from lagrangian_cubics.visuals.plots import (
    locus_gallery,
    plot_circuit_scan,
    plot_class_histogram,
    plot_homogeneous_curves,
)
from lagrangian_cubics.visuals.styles import apply_default_style


def main() -> None:
    """Generate the figures and save them with a JSON summary."""
    apply_default_style()
    seed = 2024
    trials = 60

    print("=" * 70)
    print("Lagrangian cubic gallery")
    print("=" * 70)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    output_dir = Path("data") / "results" / f"gallery_{timestamp}"
    output_dir.mkdir(parents=True, exist_ok=True)
    print(f"Output directory: {output_dir}")

    print("  - Real loci of the ternary normal forms...")
    forms = {label.value: ternary.normal_form(label, 1) for label in ternary.TernaryLabel}
    forms["nonsingular_two_circuits"] = ternary.hesse_form(-1)
    fig = locus_gallery(forms)
    fig.savefig(output_dir / "real_loci.png", dpi=150, bbox_inches="tight")
    plt.close(fig)

    print("  - Homogeneous curves...")
    curves = {
        "(0,-1,1)": homogeneous_curve(0, -1, 1),
        "(1,1,-1)": homogeneous_curve(1, 1, -1),
        "(0,1,1)": homogeneous_curve(0, 1, 1),
        "(0,1,0)": homogeneous_curve(0, 1, 0),
    }
    fig = plot_homogeneous_curves(curves)
    fig.savefig(output_dir / "homogeneous_curves.png", dpi=150, bbox_inches="tight")
    plt.close(fig)

    print("  - Circuit scan...")
    scan = circuits_scan(-3.0, 3.0, 41, seed, lines=360)
    fig = plot_circuit_scan(scan["rows"])
    fig.savefig(output_dir / "circuits.png", dpi=150, bbox_inches="tight")
    plt.close(fig)
    print(f"    agreement {scan['agreement']:.2%}")

    print(f"  - Nice-form experiment ({trials} trials)...")
    report = conjecture_experiment(2, 3, trials, seed=seed, restarts=30)
    fig = plot_class_histogram(report)
    fig.savefig(output_dir / "nice_classes.png", dpi=150, bbox_inches="tight")
    plt.close(fig)
    print(f"    success rate {report.success_rate:.2%}")

    summary = {"seed": seed, "circuits": {k: v for k, v in scan.items() if k != "rows"}, "nice": report.as_record()}
    (output_dir / "summary.json").write_text(json.dumps(summary, indent=2))
    print(f"\nAll figures saved to: {output_dir}")


if __name__ == "__main__":
    main()
