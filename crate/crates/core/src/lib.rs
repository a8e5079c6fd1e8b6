//! Per-mode numerical laboratory for the linearized Boussinesq equations
//! around a stably stratified Couette flow.
//!
//! The crate integrates each Fourier mode in the moving frame that
//! straightens the shear, evaluates the symmetrized energy functional and
//! its decay envelopes for sheared (k != 0) modes, propagates streak
//! (k = 0) modes in closed form, and aggregates per-mode results into the
//! enhanced-dissipation and lift-up-suppression statistics.
//!
//! All numerics are generic over the floating scalar through [`Scalar`];
//! the `*64` aliases fix `f64` for ordinary use.

pub mod error;
pub mod evolve;
pub mod field;
pub mod kernels;
pub mod mode;
pub mod ode;
pub mod params;
pub mod quad;
pub mod scalar;
pub mod streak;
pub mod symbol;
pub mod symmetrize;

pub use error::{Error, Result};
pub use evolve::{
    check_energy_identity, default_t_end, energy, energy_identity_rhs, envelope_symmetric,
    envelope_symmetric_sharp, envelope_u1u3, integrate_mode, rhs_qtheta, rhs_symmetric, rhs_u1u3,
    IntegratorConfig, Method, SampleDiagnostics, Trajectory,
};
pub use field::{
    build_modes, hs_norm, l2_norm_sq, l2_norm_sq_shifted, mass_truncation_fraction,
    propagate_streak_runs, theorem1_report, theorem2_report, BuiltMode, EtaGrid, GaussianProfile,
    InitialConditionSpec, ModeEntry, ModeProfiles, ModeRun, ModeSamples, NormReport, StreakRun,
};
pub use kernels::{coshc_stable, exp_coshc, exp_sinhc, sinhc_stable};
pub use mode::ModeIndex;
pub use ode::{solve_sampled, AdaptiveOptions};
pub use params::{rate_constants, PhysParams, RateConstants};
pub use quad::{adaptive_simpson, gauss_legendre, integral_p_neg34};
pub use scalar::Scalar;
pub use streak::{
    coupling_block, exp_m, hyperbolic_bounds_check, liftup_baseline, propagate_streak,
    scale_streak, streak_pointwise_bound, streak_rhs, unscale_streak, KernelParams,
    StreakBoundCoefficients, StreakScaled, StreakState,
};
pub use symbol::{
    fourth_root, integral_p, symbol_p, symbol_p_prime, symbol_p_second, symbol_ratio,
    symbol_ratio_derivative,
};
pub use symmetrize::{
    divergence_residual, from_symmetric, to_symmetric, u2_from_q, NonzeroModeState,
    SymmetricState,
};

pub type ModeIndex64 = ModeIndex<f64>;
pub type PhysParams64 = PhysParams<f64>;
pub type RateConstants64 = RateConstants<f64>;
pub type NonzeroModeState64 = NonzeroModeState<f64>;
pub type SymmetricState64 = SymmetricState<f64>;
pub type IntegratorConfig64 = IntegratorConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type SampleDiagnostics64 = SampleDiagnostics<f64>;
pub type StreakState64 = StreakState<f64>;
pub type StreakScaled64 = StreakScaled<f64>;
pub type KernelParams64 = KernelParams<f64>;
pub type StreakBoundCoefficients64 = StreakBoundCoefficients<f64>;
pub type GaussianProfile64 = GaussianProfile<f64>;
pub type ModeProfiles64 = ModeProfiles<f64>;
pub type ModeEntry64 = ModeEntry<f64>;
pub type InitialConditionSpec64 = InitialConditionSpec<f64>;
pub type EtaGrid64 = EtaGrid<f64>;
pub type ModeSamples64 = ModeSamples<f64>;
pub type ModeRun64 = ModeRun<f64>;
pub type StreakRun64 = StreakRun<f64>;
pub type NormReport64 = NormReport<f64>;
pub type AdaptiveOptions64 = AdaptiveOptions<f64>;
