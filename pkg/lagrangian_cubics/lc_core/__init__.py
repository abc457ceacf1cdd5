"""Core algebra: forms, generating functions, dynamics and the tableau."""

from .dynamics import QuadraticHamiltonian, homogeneous_curve, poisson_bracket
from .errors import InvalidInputError, NonConvergenceError, NonGenericInputError
from .forms import HomogeneousForm, LinearTransform, SymTensor, change_variables, depolarize, polarize
from .genfun import GeneratingJet, LagrangianPatch, cubic_invariant, jet_from_patch
from .tableau import TableauReport, cartan_test, kernel_dimension

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
    "TableauReport",
    "cartan_test",
    "change_variables",
    "cubic_invariant",
    "depolarize",
    "homogeneous_curve",
    "jet_from_patch",
    "kernel_dimension",
    "poisson_bracket",
    "polarize",
]
