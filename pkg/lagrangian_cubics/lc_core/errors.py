"""Exception types shared by the library and the command line front end."""

from __future__ import annotations


class InvalidInputError(ValueError):
    """Raised for malformed forms, wrong dimensions or out-of-domain points."""


class NonGenericInputError(InvalidInputError):
    """Raised when an input lies on an excluded degenerate locus."""


class NonConvergenceError(RuntimeError):
    """Raised when a numerical procedure exhausts its attempts."""
