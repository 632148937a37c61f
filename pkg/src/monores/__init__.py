"""monores: resolvents, contraction iteration and implicit-Euler flows for
monotone linear operators on finite-dimensional weighted coefficient spaces."""

from .errors import (
    EstimateUnavailableError,
    NonConvergenceError,
    NumericalError,
    UsageError,
)
from .linalg import (
    HVector,
    SubspaceBasis,
    TridiagonalSystem,
    complement_dimension,
    inner_product,
    norm,
    orthonormalize,
    solve_spd,
    solve_tridiagonal,
)
from .operators import (
    CertificateReport,
    Diagonal,
    Laplacian1D,
    Laplacian2D,
    Multiplication,
    OperatorSpec,
    RightShift,
    SpdMatrix,
    apply,
    apply_system,
    assemble_shifted,
    laplacian_eigenpair,
    monotonicity_certificate,
    natural_weight,
    operator_from_json,
    operator_norm_estimate,
    operator_to_json,
    unboundedness_probe,
)
from .fixedpoint import (
    ContractionMap,
    IterationReport,
    apriori_bound,
    estimate_contraction,
    iterate,
)
from .resolvent import (
    BootstrapTrace,
    ResolventConfig,
    bootstrap_map,
    equation_residual,
    nonexpansiveness_certificate,
    resolve,
    resolve_bootstrap,
    resolve_direct,
    stage_schedule,
)
from .evolution import (
    FlowConfig,
    Trajectory,
    evolve,
    implicit_euler_step,
    spectral_exact_flow,
)

__version__ = "0.1.0"

__all__ = [
    "HVector", "TridiagonalSystem", "SubspaceBasis",
    "inner_product", "norm", "solve_tridiagonal", "solve_spd",
    "orthonormalize", "complement_dimension",
    "OperatorSpec", "SpdMatrix", "Diagonal", "Multiplication", "RightShift",
    "Laplacian1D", "Laplacian2D", "CertificateReport",
    "apply", "apply_system", "assemble_shifted", "monotonicity_certificate",
    "operator_norm_estimate", "unboundedness_probe", "laplacian_eigenpair",
    "natural_weight", "operator_to_json", "operator_from_json",
    "ContractionMap", "IterationReport", "iterate", "apriori_bound",
    "estimate_contraction",
    "ResolventConfig", "BootstrapTrace", "resolve", "resolve_direct",
    "resolve_bootstrap", "bootstrap_map", "stage_schedule",
    "equation_residual", "nonexpansiveness_certificate",
    "FlowConfig", "Trajectory", "implicit_euler_step", "evolve",
    "spectral_exact_flow",
    "UsageError", "NumericalError", "NonConvergenceError",
    "EstimateUnavailableError",
]
