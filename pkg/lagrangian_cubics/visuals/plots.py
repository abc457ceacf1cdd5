"""High level plotting helpers using matplotlib."""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

import matplotlib.pyplot as plt
import numpy as np
import sympy as sp

from ..classifiers.niceform import ConjectureReport
from ..lc_core.dynamics import HomogeneousCurve
from ..lc_core.errors import InvalidInputError
from ..lc_core.forms import HomogeneousForm
from .styles import KIND_COLORS, plane_axes


def _affine_values(F: HomogeneousForm, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    x, y, z = F.symbols()
    expr = F.as_float().to_sympy().subs(z, 1)
    values = sp.lambdify((x, y), expr, "numpy")(X, Y)
    return np.broadcast_to(np.asarray(values, dtype=float), X.shape)


def real_locus(
    F: HomogeneousForm,
    extent: float = 3.0,
    resolution: int = 400,
    ax: Optional[plt.Axes] = None,
    title: Optional[str] = None,
) -> plt.Figure:
    """Draw the real points of a ternary cubic in the affine chart ``z = 1``.

    Parameters
    ----------
    F:
        Ternary form.
    extent:
        Half width of the square window.
    resolution:
        Grid points per side for the zero contour.
    ax:
        Axes to draw on; a new figure is created when omitted.

    Returns
    -------
    matplotlib.figure.Figure
        Figure containing the curve.
    """
    if F.dim != 3:
        raise InvalidInputError("real_locus draws ternary forms")
    if ax is None:
        fig, ax = plt.subplots(figsize=(5, 5))
    else:
        fig = ax.figure
    grid = np.linspace(-extent, extent, resolution)
    X, Y = np.meshgrid(grid, grid)
    Z = _affine_values(F, X, Y)
    if np.any(Z > 0) and np.any(Z < 0):
        ax.contour(X, Y, Z, levels=[0.0], colors="tab:blue", linewidths=1.5)
    plane_axes(ax, extent)
    ax.set_title(title if title is not None else str(F.to_sympy()), fontsize=9)
    return fig


def locus_gallery(forms: Mapping[str, HomogeneousForm], extent: float = 3.0, columns: int = 5) -> plt.Figure:
    """One real-locus panel per named ternary form."""

    names = list(forms)
    rows = max(1, -(-len(names) // columns))
    fig, axes = plt.subplots(rows, columns, figsize=(3 * columns, 3 * rows), squeeze=False)
    for ax, name in zip(axes.ravel(), names):
        real_locus(forms[name], extent=extent, resolution=250, ax=ax, title=name.replace("_", " "))
    for ax in axes.ravel()[len(names) :]:
        ax.axis("off")
    fig.tight_layout()
    return fig


def plot_homogeneous_curves(
    curves: Mapping[str, HomogeneousCurve], t_range: tuple[float, float] = (-2.0, 2.0), samples: int = 400
) -> plt.Figure:
    """Overlay homogeneous Lagrangian curves, coloured by kind."""

    ts = np.linspace(t_range[0], t_range[1], samples)
    fig, ax = plt.subplots(figsize=(6, 6))
    extent = 0.0
    for name, curve in curves.items():
        span = ts
        if curve.period is not None:
            span = np.linspace(0.0, curve.period, samples)
        points = curve.sample(span)
        extent = max(extent, float(np.max(np.abs(points))))
        ax.plot(points[:, 0], points[:, 1], color=KIND_COLORS[curve.kind.value], label=f"{name} ({curve.kind.value})")
        ax.plot(*curve.x0, marker="o", color="black", markersize=3)
    plane_axes(ax, 1.1 * extent if extent else 1.0, "q", "p")
    ax.legend(fontsize=8)
    ax.set_title("Homogeneous Lagrangian curves")
    fig.tight_layout()
    return fig


def plot_class_histogram(report: ConjectureReport) -> plt.Figure:
    """Number of nice-form solution classes per successful trial.

    Parameters
    ----------
    report:
        Result of the conjecture experiment.

    Returns
    -------
    matplotlib.figure.Figure
        Side-by-side bars for classes modulo permutation with and without sign flips.
    """
    keys = sorted(set(report.class_histogram) | set(report.class_histogram_unsigned))
    positions = np.arange(len(keys))
    width = 0.4
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(positions - width / 2, [report.class_histogram.get(k, 0) for k in keys], width, label="permutations and signs")
    ax.bar(
        positions + width / 2,
        [report.class_histogram_unsigned.get(k, 0) for k in keys],
        width,
        label="permutations only",
    )
    ax.set_xticks(positions)
    ax.set_xticklabels([str(k) for k in keys])
    ax.set_xlabel("Solution classes")
    ax.set_ylabel("Trials")
    ax.set_title(f"Nice forms, n={report.n}, d={report.d}: success rate {report.success_rate:.2%}")
    ax.legend()
    ax.grid(True, alpha=0.3, axis="y")
    fig.tight_layout()
    return fig


def plot_circuit_scan(rows: Iterable[Mapping[str, float]], marker_sigma: Sequence[float] = (-0.5,)) -> plt.Figure:
    """Circuit counts against the Hesse parameter, two counting methods overlaid."""

    rows = sorted(rows, key=lambda r: r["sigma"])
    sigma = [r["sigma"] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.step(sigma, [r["weierstrass"] for r in rows], where="mid", label="flex discriminant")
    ax.plot(sigma, [r["sampled"] for r in rows], "o", markersize=4, label="line sampling")
    for value in marker_sigma:
        ax.axvline(value, color="black", linestyle="--", linewidth=0.8)
    ax.set_yticks([1, 2])
    ax.set_xlabel("sigma")
    ax.set_ylabel("Circuits")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig
