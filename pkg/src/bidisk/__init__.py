"""Numerical geometry of the complex hyperbolic plane and the complex bidisk.

The library covers the Bergman metric on the unit ball in C^2, isometries of
the ball and of the product space (including the factor swap), Busemann
functions and boundary asymptotics, equidistant-hypersurface sampling via
root finding, and an end-to-end numerical verification that the Dirichlet
domain of a cyclic group generated by a pair of loxodromic isometries has
exactly two faces.
"""

__version__ = "0.1.0"

from .errors import (
    BadParameter,
    BracketFailure,
    DegenerateGeodesic,
    DegenerateGroup,
    FormMismatch,
    GeometryError,
    InternalError,
    NotBoundary,
    NotInterior,
    NotUnitaryForForm,
    NumericalDomainError,
    NumericalFailure,
    UndefinedBusemann,
    UnsupportedConversion,
    WrongClass,
)
from .forms import (
    FormKind,
    HermitianForm,
    ProjectiveVector,
    SignClass,
    ball_form,
    hermitian_pairing,
    siegel_form,
)
from .hyperbolic import (
    BallPoint,
    BoundaryPoint,
    Geodesic,
    angular_distance,
    boundary_asymptotic_residual,
    busemann_closed,
    busemann_limit,
    distance,
    distance_lifts,
    geodesic_point,
    lift,
    origin,
    random_ball_point,
    random_boundary_point,
)
from .isometry import (
    IsometryClass,
    IsometryType,
    LoxodromicData,
    SpecialUnitaryElement,
    apply,
    axis,
    change_form,
    classify,
    fixed_boundary_points,
    frame_at,
    loxodromic_data,
    random_element,
    random_loxodromic,
    translation_length,
    verify_membership,
)
from .product import (
    BidiskIsometry,
    BidiskPoint,
    ProductGeodesic,
    apply_bidisk,
    compose,
    identity_bidisk,
    inverse,
    pure_swap,
    random_bidisk_isometry,
    random_bidisk_point,
    rho,
)
from .equidistant import (
    AccumulationReport,
    BisectorSpec,
    LevelSlice,
    SampleCloud,
    bisector_residual,
    boundary_accumulation_check,
    sample_bisector,
    sample_factor_level_set,
    signed_difference,
)
from .dirichlet import (
    DisjointnessCertificate,
    MembershipResult,
    SweepReport,
    TwoFaceConfig,
    VerificationReport,
    VisibilityVerdict,
    certify_disjoint,
    dirichlet_membership,
    invisibility_sweep,
    is_visible,
    sphere_geodesic_intersections,
    two_face_verify,
)
