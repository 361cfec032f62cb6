"""Symplectic splitting integrators for the Kepler problem and the precession
they induce, with closed-form predictions and a measurement harness."""

from symprec.error_hamiltonians import (
    EomFields,
    ErrorCoefficients,
    ErrorHamiltonianId,
    QuadraticFamilyParams,
    error_h_flow_derivatives,
    eval_error_h,
    quadratic_eom,
    quartic_eom,
)
from symprec.experiments import (
    MeasurementResult,
    TrajectoryRecord,
    brute_force_delta_theta,
    convergence_sweep,
    h4_error_function,
    integrate_period,
    measure_scaled_precession,
    standard_initial_state,
)
from symprec.integrators import (
    Drift,
    GradientKick,
    Kick,
    SplittingScheme,
    WStep,
    named_scheme,
    step,
    validate_scheme,
    w_step,
)
from symprec.kepler import (
    LrlTracker,
    OrbitElements,
    PhaseState,
    kepler_force,
    lrl_angle_update,
    lrl_vector,
    orbit_elements,
)
from symprec.precession import (
    PrecessionPrediction,
    c_n,
    delta_theta_central,
    delta_theta_for,
    delta_theta_quadratic,
    predict_algorithm_precession,
    s_n,
)

__version__ = "0.1.0"
