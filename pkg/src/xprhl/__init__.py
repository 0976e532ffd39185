"""Relational reasoning about pairs of probabilistic programs.

Derivations in a coupling-based relational program logic are checked by a
small kernel; every accepted derivation yields a product program whose
marginals agree exactly with the two related programs.  Products are then
analysed: exact and sampled failure probabilities, total-variation bounds,
and path-coupling contraction certificates.
"""

__version__ = "1.0.0"

from .semantics import EvalError, ExactResult, Memory, ResourceError, SubDist, exec_exact
from .kernel import CheckContext, Derivation, Judgment, check, validate_product

__all__ = [
    "__version__",
    "EvalError", "ExactResult", "Memory", "ResourceError", "SubDist",
    "exec_exact",
    "CheckContext", "Derivation", "Judgment", "check", "validate_product",
]
