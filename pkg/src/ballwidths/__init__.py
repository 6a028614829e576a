"""Order estimates for Kolmogorov widths of intersections of weighted lp balls."""

from .balls import (
    BallFamily,
    BallSpec,
    TruncatedOctahedron,
    boundary_scale,
    flat_sup_norm,
    lp_norm,
    member,
    vk_member,
)
from .exceptions import (
    ConditionViolationError,
    ConfigError,
    DomainRangeError,
    InvalidInputError,
    PreconditionError,
    RedirectError,
    UnsupportedRegimeError,
    WidthError,
)
from .formulas import (
    Case,
    EstimateResult,
    RegimePartition,
    WidthQuery,
    estimate,
    garnaev_gluskin,
    gluskin_single_ball,
    partition,
    pietsch_stesin,
    theorem1_estimate,
    theorem2_estimate,
)
from .kappa import KappaMatrix, check_condition4, kappa_identity_check, kappa_matrix, kappa_pair
from .normalize import WeightProfile, normalize_family, nu_star, nu_star_star
from .oracle import (
    Resolution,
    SandwichReport,
    brute_force_width,
    coordinate_upper_bound,
    inscribed_lower_bound,
    sandwich,
)

__version__ = "0.1.0"

__all__ = [
    "BallFamily", "BallSpec", "TruncatedOctahedron", "boundary_scale", "flat_sup_norm", "lp_norm",
    "member", "vk_member",
    "ConditionViolationError", "ConfigError", "DomainRangeError", "InvalidInputError",
    "PreconditionError", "RedirectError", "UnsupportedRegimeError", "WidthError",
    "Case", "EstimateResult", "RegimePartition", "WidthQuery", "estimate", "garnaev_gluskin",
    "gluskin_single_ball", "partition", "pietsch_stesin", "theorem1_estimate", "theorem2_estimate",
    "KappaMatrix", "check_condition4", "kappa_identity_check", "kappa_matrix", "kappa_pair",
    "WeightProfile", "normalize_family", "nu_star", "nu_star_star",
    "Resolution", "SandwichReport", "brute_force_width", "coordinate_upper_bound",
    "inscribed_lower_bound", "sandwich",
]
