"""Combinatorial Yamabe flow on triangulated 3-manifolds with conformal
(sphere-packing) edge lengths, plus numerical checks of its sign, spectral
and monotonicity properties."""

from .complex import (
    PRESETS,
    ComplexError,
    MetricAssignment,
    ParseError,
    SimplicialComplex,
    load_complex,
    parse_complex,
    preset,
    serialize_complex,
    validate_complex,
)
from .flow import (
    CurvatureState,
    FlowConfig,
    FlowTrace,
    LaplacianCoefficients,
    assemble_laplacian,
    curvature,
    curvature_rhs,
    run_flow,
)
from .geometry import (
    DegenerateTetrahedronError,
    JacobianBlock,
    TetraScalars,
    dalpha_matrix,
    nondegeneracy_q,
    omega_block,
    solid_angles,
    tetra_scalars,
    volume,
)
from .analysis import (
    angle_monotonicity_scan,
    classify_operator,
    degeneration_probe,
    hessian_spectrum,
    minor_determinant_check,
    monotonicity_check,
    omega_sign_audit,
)
from .audit import run_check

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "ComplexError",
    "ParseError",
    "MetricAssignment",
    "SimplicialComplex",
    "load_complex",
    "parse_complex",
    "preset",
    "serialize_complex",
    "validate_complex",
    "CurvatureState",
    "FlowConfig",
    "FlowTrace",
    "LaplacianCoefficients",
    "assemble_laplacian",
    "curvature",
    "curvature_rhs",
    "run_flow",
    "DegenerateTetrahedronError",
    "JacobianBlock",
    "TetraScalars",
    "dalpha_matrix",
    "nondegeneracy_q",
    "omega_block",
    "solid_angles",
    "tetra_scalars",
    "volume",
    "angle_monotonicity_scan",
    "classify_operator",
    "degeneration_probe",
    "hessian_spectrum",
    "minor_determinant_check",
    "monotonicity_check",
    "omega_sign_audit",
    "run_check",
]
