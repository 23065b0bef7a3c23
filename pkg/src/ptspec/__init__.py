"""High-precision spectra of the PT-symmetric family

    -psi''(z) - (iz)**N psi(z) = E psi(z),   integer N >= 2,

computed from exact-rational truncated double power series.  The
eigenvalue condition is the reality of the connection coefficient
c(E) = -psi1/psi2 probed on a PT pair of Stokes wedges; nodes and
PT expectation values of the eigenfunctions come from the same
series.
"""

from .errors import (
    BracketError,
    DegenerateNormError,
    DivergenceError,
    GeometryError,
    ParameterError,
    PoleError,
    PtspecError,
    RadiusError,
    TruncationError,
)
from .nodes import NodeSet, find_nodes, newton_zero, turning_points
from .observables import (
    Contour,
    ExpectationResult,
    IdentityReport,
    IdentityRow,
    build_contour,
    default_contour,
    expectation,
    identity_checks,
    wavefunction_samples,
)
from .precision import ComplexHP, PrecisionContext, RealHP, as_fraction
from .quantize import (
    EnergyLevel,
    HealthEntry,
    HealthReport,
    LevelDiagnostics,
    ScanPoint,
    connection_coefficient,
    health_check,
    level_weights,
    quantize_p_symmetric,
    refine_root,
    scan_im_c,
    spectrum,
)
from .series import (
    CoefficientTable,
    TruncationParams,
    boundary_residual,
    build_tables,
    energy_polynomials,
    eval_psi,
    load_table,
    residual,
    save_table,
    space_polynomial,
    tail_ratio,
    wronskian,
)
from .wedges import WedgePair, ground_angle, pt_pairs, pt_reflect, reduce_angle

__version__ = "1.0.0"

__all__ = [
    "PtspecError",
    "ParameterError",
    "BracketError",
    "PoleError",
    "RadiusError",
    "DivergenceError",
    "GeometryError",
    "DegenerateNormError",
    "TruncationError",
    "PrecisionContext",
    "ComplexHP",
    "RealHP",
    "as_fraction",
    "CoefficientTable",
    "TruncationParams",
    "build_tables",
    "eval_psi",
    "residual",
    "boundary_residual",
    "tail_ratio",
    "wronskian",
    "energy_polynomials",
    "space_polynomial",
    "save_table",
    "load_table",
    "WedgePair",
    "ground_angle",
    "reduce_angle",
    "pt_reflect",
    "pt_pairs",
    "ScanPoint",
    "LevelDiagnostics",
    "EnergyLevel",
    "HealthEntry",
    "HealthReport",
    "level_weights",
    "connection_coefficient",
    "scan_im_c",
    "refine_root",
    "spectrum",
    "quantize_p_symmetric",
    "health_check",
    "NodeSet",
    "turning_points",
    "newton_zero",
    "find_nodes",
    "Contour",
    "ExpectationResult",
    "IdentityRow",
    "IdentityReport",
    "build_contour",
    "default_contour",
    "expectation",
    "identity_checks",
    "wavefunction_samples",
    "__version__",
]
