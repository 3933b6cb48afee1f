"""Toeplitz operators on the Hardy space of the polydisc.

Finite models of T_phi for Laurent-polynomial and Blaschke-product symbols,
checkers for the partial-isometry theory, and the Halmos-Wallen
decomposition of finite power partial isometries.
"""

from .checkers import (
    CheckReport, NormEstimate, check_commutation, check_doubly_commuting, check_final_projection,
    check_hyponormal, check_partial_isometry, check_power_partial_isometry,
    check_range_invariance, check_unimodular, estimate_norm, shift_decay,
)
from .errors import (
    BudgetExceeded, ChainOrthogonalityError, DimensionMismatch, InvalidInput, NotPartialIsometry,
    PreconditionError, ToeplitzError,
)
from .gaussian import GaussianRational, parse_gaussian
from .laurent import LaurentPoly, lp_analytic_project, lp_conj_torus, lp_eval, lp_mul
from .series import TruncatedSeries, coeff, expand
from .structure import (
    HWDecomposition, classify_operator, classify_variables, factorize, hw_decompose,
)
from .symbol import (
    Blaschke, Conj, Constant, Laurent, Monomial, Product, Sum, Symbol, evaluate,
    sup_norm_bounds, symbol_from_json, symbol_hash, symbol_to_json,
)
from .toeplitz import (
    CompressionMatrix, DegreeBox, compression, gram_compression, gram_compression_exact,
    pi_residual, toeplitz_apply_exact,
)

__version__ = "0.1.0"

__all__ = [
    "CheckReport", "NormEstimate", "check_commutation", "check_doubly_commuting",
    "check_final_projection", "check_hyponormal", "check_partial_isometry",
    "check_power_partial_isometry", "check_range_invariance", "check_unimodular",
    "estimate_norm", "shift_decay", "BudgetExceeded", "ChainOrthogonalityError",
    "DimensionMismatch", "InvalidInput", "NotPartialIsometry", "PreconditionError",
    "ToeplitzError", "GaussianRational", "parse_gaussian", "LaurentPoly", "lp_analytic_project",
    "lp_conj_torus", "lp_eval", "lp_mul", "TruncatedSeries", "coeff", "expand",
    "HWDecomposition", "classify_operator", "classify_variables", "factorize", "hw_decompose",
    "Blaschke", "Conj", "Constant", "Laurent", "Monomial", "Product", "Sum", "Symbol",
    "evaluate", "sup_norm_bounds", "symbol_from_json", "symbol_hash", "symbol_to_json",
    "CompressionMatrix", "DegreeBox", "compression", "gram_compression",
    "gram_compression_exact", "pi_residual", "toeplitz_apply_exact",
    "__version__",
]
