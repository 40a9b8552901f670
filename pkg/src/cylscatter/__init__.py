"""Scattering phase shifts and spectral statistics on cylindrical-end surfaces.

The package builds two-parameter families of surfaces of revolution with
a conic tip and an asymptotically cylindrical end, computes their quantum
scattering phase shifts semiclassically (WKB quadratures) and exactly
(radial ODE with Numerov matching), and measures the pair-correlation
statistics of the phase shifts mod 1, together with the arithmetic and
geodesic diagnostics that control them.
"""

from .counting import (
    MeanValuePoint,
    count_F,
    count_G,
    divisor_table,
    mean_value_point,
    ramanujan_ratio,
)
from .errors import (
    AccuracyError,
    BranchError,
    ConfigurationError,
    DomainError,
    IntegrationError,
    ParameterRangeError,
)
from .paircorr import (
    GaussianTestFunction,
    PairCorrelationResult,
    ScanReport,
    ScanRow,
    model_deltas,
    pair_correlation,
    pair_span,
    parameter_scan,
    poisson_target,
    rho_direct,
    rho_fourier,
)
from .profiles import (
    FamilyParameters,
    FamilyProfile,
    LinearProfile,
    ProfileCoefficient,
    build_family_profile,
    build_linear_model,
    check_convexity_condition,
    profile_from_dict,
    profile_from_json,
    profile_to_json,
    rational_coefficient,
    validate_profile,
)
from .radial import (
    ExactPhaseResult,
    PhaseShiftTable,
    delta_exact,
    scattering_matrix,
    solve_phase_shift,
    window_indices,
)
from .rotation import (
    RotationCheck,
    action_I2,
    quantum_classical_check,
    renormalized_rotation,
)
from .wkb import (
    I_transform,
    PhaseFunction,
    capital_phi,
    capital_phi_deriv,
    export_phase_table,
    family_phase_function,
    linear_phase_function,
    phi_from_profile,
    phi_second_at_x,
    phi_second_derivative,
    profile_psi_spline,
    psi_leading,
    wkb_delta,
)

__version__ = "1.0.0"
