"""Matplotlib styling shared by the plots."""

from __future__ import annotations

import contextlib
from typing import Iterator

import matplotlib.pyplot as plt

DEFAULT_STYLE = "seaborn-v0_8"

KIND_COLORS: dict[str, str] = {
    "ellipse": "tab:blue",
    "hyperbola": "tab:red",
    "parabola": "tab:green",
    "line": "tab:gray",
}


def apply_default_style(style: str = DEFAULT_STYLE) -> None:
    plt.style.use(style)


@contextlib.contextmanager
def temporary_style(style: str) -> Iterator[None]:
    saved = plt.rcParams.copy()
    plt.style.use(style)
    try:
        yield
    finally:
        plt.rcParams.update(saved)


def plane_axes(ax: plt.Axes, extent: float, xlabel: str = "x", ylabel: str = "y") -> None:
    """Square window ``[-extent, extent]^2`` with equal scaling and light axes."""

    ax.set_xlim(-extent, extent)
    ax.set_ylim(-extent, extent)
    ax.set_aspect("equal")
    ax.axhline(0.0, color="black", linewidth=0.5, alpha=0.4)
    ax.axvline(0.0, color="black", linewidth=0.5, alpha=0.4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
