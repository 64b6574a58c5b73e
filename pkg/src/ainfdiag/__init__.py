"""ainfdiag - diagonals on associahedra and A-infinity tensor products.

The package computes the permutahedral and associahedral diagonals from
derived matrices, builds A-infinity structures on H*(C_n) and their tensor
products, and checks the operations of H*(C_n × C_m) against closed formulas,
brute-force oracles and the Stasheff identities.
"""

from .ainf_core import (
    AInfStructure,
    Element,
    Monomial,
    TensorMonomial,
    evaluate_tree,
    madsen_algebra,
    stasheff_check,
    tensor_structure,
)
from .config import RunConfig
from .exceptions import (
    AInfDiagError,
    ConfigurationError,
    ContractViolation,
    MonomialParseError,
    ResourceLimitError,
    VerificationError,
)
from .su_diagonal import SparseIntMatrix, delta_P_top, derived_matrices
from .trees import PlanarTree, delta_K, tonks
from .utils import setup_logging

try:
    from ._version import __version__
except ImportError:
    # Fallback version if hatch-vcs has not written _version.py
    __version__ = "0.1.0"

__author__ = "ainfdiag contributors"
__license__ = "Apache License 2.0"

__all__ = [
    "AInfStructure",
    "Element",
    "Monomial",
    "TensorMonomial",
    "PlanarTree",
    "SparseIntMatrix",
    "RunConfig",
    "delta_K",
    "delta_P_top",
    "derived_matrices",
    "evaluate_tree",
    "madsen_algebra",
    "stasheff_check",
    "tensor_structure",
    "tonks",
    "setup_logging",
    "AInfDiagError",
    "ConfigurationError",
    "ContractViolation",
    "MonomialParseError",
    "ResourceLimitError",
    "VerificationError",
]
