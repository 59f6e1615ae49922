"""Random walks on PSL(2, Z), their boundary chains, and the Minkowski ? function."""

from .cfrac import INF, ContinuedFraction, ExtendedRational, as_ext, expand, expand_unit
from .errors import DegenerateInputError, DomainError, ModwalkError, ResourceLimitError
from .minkowski import DyadicRational, chi_half, lambda_survival, qmark, qmark_inverse, qmark_oracle
from .psl2z import GENERATORS, IDENTITY, ProjectiveMatrix, UpperHalfPoint
from .chains import WalkConfig, WalkResult, simulate
from .tiling import cayley_ball, reduce_to_fundamental

__all__ = [
    "INF",
    "ContinuedFraction",
    "DegenerateInputError",
    "DomainError",
    "DyadicRational",
    "ExtendedRational",
    "GENERATORS",
    "IDENTITY",
    "ModwalkError",
    "ProjectiveMatrix",
    "ResourceLimitError",
    "UpperHalfPoint",
    "WalkConfig",
    "WalkResult",
    "as_ext",
    "cayley_ball",
    "chi_half",
    "expand",
    "expand_unit",
    "lambda_survival",
    "qmark",
    "qmark_inverse",
    "qmark_oracle",
    "reduce_to_fundamental",
    "simulate",
]

__version__ = "0.1.0"
