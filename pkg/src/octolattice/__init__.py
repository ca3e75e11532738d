"""Discrete octonionic analysis on the lattice h Z^8."""
from .algebra import (
    EXACT,
    FLOAT,
    Octonion,
    associator,
    basis_mul,
    conj,
    mul,
    norm_sq,
    triple_census,
    triple_sign,
)
from .errors import DomainError, ParseError
from .lattice import (
    LOWER,
    UPPER,
    WHOLE,
    LatticeFunction,
    Region,
    delta,
    linear,
    linear_combination,
    random_function,
    read_function,
    write_function,
)
from .operators import (
    LEFT_BACKWARD,
    LEFT_FORWARD,
    RIGHT_BACKWARD,
    RIGHT_FORWARD,
    OperatorVariant,
    apply_cr,
    backward_diff,
    factorization_residual,
    forward_diff,
    is_monogenic,
    residual_check,
    star_laplacian,
)
from .oracle import brute_force_oracle
from .stokes import (
    IdentityReport,
    boundary_term_claim,
    boundary_term_derived,
    correction_term,
    pairing,
    theorem_report,
)

__all__ = [
    "DomainError",
    "EXACT",
    "FLOAT",
    "IdentityReport",
    "LEFT_BACKWARD",
    "LEFT_FORWARD",
    "LOWER",
    "LatticeFunction",
    "Octonion",
    "OperatorVariant",
    "ParseError",
    "RIGHT_BACKWARD",
    "RIGHT_FORWARD",
    "Region",
    "UPPER",
    "WHOLE",
    "apply_cr",
    "associator",
    "backward_diff",
    "basis_mul",
    "boundary_term_claim",
    "boundary_term_derived",
    "brute_force_oracle",
    "conj",
    "correction_term",
    "delta",
    "factorization_residual",
    "forward_diff",
    "is_monogenic",
    "linear",
    "linear_combination",
    "mul",
    "norm_sq",
    "pairing",
    "random_function",
    "read_function",
    "residual_check",
    "star_laplacian",
    "theorem_report",
    "triple_census",
    "triple_sign",
    "write_function",
]

__version__ = "0.1.0"
