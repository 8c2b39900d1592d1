"""Exact experimentation toolkit for bounded-support shifted partial derivatives.

Subpackages:
    gf2      -- GF(2^k) arithmetic and bit-packed linear algebra over F_2
    poly     -- sparse multivariate polynomials with exact rational coefficients
    nw       -- the Nisan-Wigderson polynomial family over an n x n variable grid
    measure  -- exact dimension of (support, degree, order)-shifted partial derivatives
    circuit  -- homogeneous depth-4 circuits and their measure upper bound
    restrict -- the affine random restriction procedure over GF(2^k)
    bounds   -- closed-form bound evaluation and parameter search
    cli      -- command-line front door
"""

__version__ = "0.1.0"

from .bounds import ParamSet, Recipe, parameter_search, topfanin_ratio
from .circuit import Depth4Circuit, circuit_measure_upper_bound, expand, validate
from .errors import BudgetExceededError, InfeasibleSystemError, NoQualifyingTrialsError
from .gf2 import GF2Matrix, GF2kField, default_field, eval_matrix, gf_mul, mult_matrix
from .measure import MeasureQuery, shifted_partials_dim
from .nw import NWParams, generate_nw
from .poly import Monomial, Polynomial, gridvar, xvar
from .restrict import RestrictionOutcome, run_restriction

__all__ = [
    "BudgetExceededError",
    "Depth4Circuit",
    "GF2Matrix",
    "GF2kField",
    "InfeasibleSystemError",
    "MeasureQuery",
    "Monomial",
    "NWParams",
    "NoQualifyingTrialsError",
    "ParamSet",
    "Polynomial",
    "Recipe",
    "RestrictionOutcome",
    "__version__",
    "circuit_measure_upper_bound",
    "default_field",
    "eval_matrix",
    "expand",
    "generate_nw",
    "gf_mul",
    "gridvar",
    "mult_matrix",
    "parameter_search",
    "run_restriction",
    "shifted_partials_dim",
    "topfanin_ratio",
    "validate",
    "xvar",
]
