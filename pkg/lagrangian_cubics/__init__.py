"""Cubic form invariants of Lagrangian submanifolds in affine symplectic space.

The package computes the second-order invariant of a Lagrangian submanifold
(a cubic form), classifies binary and ternary cubics up to real linear
change of variables, runs Cartan's test on the associated tableau and
provides the quadratic Hamiltonian machinery for homogeneous examples.
"""

__version__ = "0.1.0"

from .lc_core.dynamics import QuadraticHamiltonian
from .lc_core.errors import InvalidInputError, NonConvergenceError, NonGenericInputError
from .lc_core.forms import HomogeneousForm, LinearTransform, SymTensor
from .lc_core.genfun import GeneratingJet, LagrangianPatch

__all__ = [
    "GeneratingJet",
    "HomogeneousForm",
    "InvalidInputError",
    "LagrangianPatch",
    "LinearTransform",
    "NonConvergenceError",
    "NonGenericInputError",
    "QuadraticHamiltonian",
    "SymTensor",
    "__version__",
]
