"""Matrix convex sets over convex bodies: membership, scaling, models.

The package decides membership in minimal and maximal matrix convex
sets over a compact convex base, in matrix ranges of operator tuples
via Choi-matrix feasibility, bisects scaling constants between the two
set constructions, compresses commuting normal tuples onto boundary
spectra, and carries a compact-perturbation toolkit for diagonal
tuples.  Everything runs on a block-diagonal semidefinite feasibility
solver with verified primal witnesses and dual separation certificates.
"""

from .errors import (
    BadProblem,
    DimensionMismatch,
    EmptyEssentialSpectrum,
    MConvexError,
    NoCertificate,
    NoInteriorZero,
    NonHermitianInput,
    NotCommuting,
    NotInKmax,
    ReducibleCandidate,
    TupleMismatch,
)
from .geometry import (
    Box,
    ConvexBody,
    Disc,
    PolygonSandwich,
    Polytope,
    Sampled,
    essential_range_hull,
    extreme_points,
    hull_distance,
    hull_membership_gap,
    is_simplex,
    jnr_sandwich,
    support_value,
)
from .linalg import (
    OperatorTuple,
    commutant_dimension,
    constant_diagonal_form,
    direct_sum,
    herm_part,
    numerical_radius,
    op_norm,
    simdiag_hermitian,
    skew_part,
    words_equivalent,
)
from .models import (
    BlockModel,
    DiagonalTuple,
    NormalTuple,
    PerturbationReport,
    SpectralModel,
    block_diagonal_model,
    cluster_essential_candidates,
    essential_spectrum_diag,
    extreme_spectral_compression,
    finite_truncation,
    joint_spectrum,
    sw_perturbation,
    verify_complete_isometry,
    verify_local_sw,
)
from .ranges import (
    MembershipResult,
    MembershipStatus,
    ThetaEstimate,
    calibrate_choi_li,
    choi_li_equiv_check,
    choi_li_transform,
    is_matrix_extreme_free_symmetric,
    is_matrix_extreme_free_unitary,
    kmax_member,
    kmin_member,
    mrange_equal,
    theta_min_alpha,
    ucp_member,
)
from .sdp import (
    AffineConstraint,
    SdpFeasibility,
    Separator,
    Status,
    Verdict,
    dual_witness,
    solve_feasibility,
    verify_witness,
)

__version__ = "0.1.0"

__all__ = [
    "AffineConstraint",
    "BadProblem",
    "BlockModel",
    "Box",
    "ConvexBody",
    "DiagonalTuple",
    "DimensionMismatch",
    "Disc",
    "EmptyEssentialSpectrum",
    "MConvexError",
    "MembershipResult",
    "MembershipStatus",
    "NoCertificate",
    "NoInteriorZero",
    "NonHermitianInput",
    "NormalTuple",
    "NotCommuting",
    "NotInKmax",
    "OperatorTuple",
    "PerturbationReport",
    "PolygonSandwich",
    "Polytope",
    "ReducibleCandidate",
    "Sampled",
    "SdpFeasibility",
    "Separator",
    "SpectralModel",
    "Status",
    "ThetaEstimate",
    "TupleMismatch",
    "Verdict",
    "block_diagonal_model",
    "calibrate_choi_li",
    "choi_li_equiv_check",
    "choi_li_transform",
    "cluster_essential_candidates",
    "commutant_dimension",
    "constant_diagonal_form",
    "direct_sum",
    "dual_witness",
    "essential_range_hull",
    "essential_spectrum_diag",
    "extreme_points",
    "extreme_spectral_compression",
    "finite_truncation",
    "herm_part",
    "hull_distance",
    "hull_membership_gap",
    "is_matrix_extreme_free_symmetric",
    "is_matrix_extreme_free_unitary",
    "is_simplex",
    "jnr_sandwich",
    "joint_spectrum",
    "kmax_member",
    "kmin_member",
    "mrange_equal",
    "numerical_radius",
    "op_norm",
    "simdiag_hermitian",
    "skew_part",
    "solve_feasibility",
    "support_value",
    "sw_perturbation",
    "theta_min_alpha",
    "ucp_member",
    "verify_complete_isometry",
    "verify_local_sw",
    "verify_witness",
    "words_equivalent",
]
