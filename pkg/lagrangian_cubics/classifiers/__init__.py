"""Orbit classifiers for cubic forms and the nice-form search."""

from .binary import BinaryCubicClass, BinaryLabel, classify_binary
from .extremes import ExtremeKind, ExtremeVerdict, extreme_type
from .niceform import NiceFormResult, find_nice_form, is_nice_form
from .ternary import Stability, TernaryCubicClass, TernaryLabel, classify_ternary

__all__ = [
    "BinaryCubicClass",
    "BinaryLabel",
    "ExtremeKind",
    "ExtremeVerdict",
    "NiceFormResult",
    "Stability",
    "TernaryCubicClass",
    "TernaryLabel",
    "classify_binary",
    "classify_ternary",
    "extreme_type",
    "find_nice_form",
    "is_nice_form",
]
