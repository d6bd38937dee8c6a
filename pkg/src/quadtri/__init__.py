"""Closed-form implicit equations of quadric rational quadratic Bezier triangles."""

from .analysis import (
    FitResult,
    PolyCoeffs,
    QuadricClass,
    classify,
    coefficient_angle,
    expand_coefficients,
    fit_by_sampling,
    validate_residuals,
)
from .errors import (
    DegenerateConfiguration,
    DegenerateConic,
    InvalidNet,
    InvalidScale,
    NormalizationSingular,
    NotInPlane,
    PoleEncountered,
    QuadtriError,
    RankDeficient,
)
from .implicitizer import (
    AdjustedWeights,
    CompatibilityReport,
    QuadricReport,
    Tetrahedron,
    assemble_quadric,
    build_tetrahedron,
    conic_scale_triple,
    coplanarity_determinant,
    implicitize,
    quadric_test,
    tangent_at_S,
)
from .patch import (
    INDEX_ORDER,
    BarycentricParam,
    ConicArc,
    ControlNet,
    boundary_conic,
    evaluate,
    evaluate_conic,
    mobius_rescale,
)
from .projective import (
    DEFAULT_TOL,
    AffineForm,
    HPoint,
    SymForm4,
    barycentric_in_plane,
    evaluate_form,
    intersect_three_planes,
    normalize_form,
    plane_through,
    sym_product,
)

__version__ = "0.1.0"
