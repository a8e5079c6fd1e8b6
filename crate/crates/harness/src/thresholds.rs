//! Pass thresholds for the check statistics. Every statistic is
//! normalized (relative error, normalized violation, or a ratio), so
//! thresholds are dimensionless.

/// Divergence residual relative to initial amplitude; exactness up to
/// integrator tolerance.
pub const DIVERGENCE: f64 = 1e-8;

/// Normalized envelope overshoot; envelopes are proved bounds, so only
/// rounding slack is tolerated.
pub const ENVELOPE_SLACK: f64 = 1e-9;

/// Overshoot of the damped-coshc/sinhc caps; the caps hold pointwise, so
/// the tolerance is pure floating-point slack.
pub const HYPERBOLIC: f64 = 1e-12;

/// Relative error of the unstratified peak against `|u2(0)| / (e nu n^2)`.
pub const LIFTUP_PEAK: f64 = 0.01;

/// Default cap on theorem sup-ratios when the config does not pin one.
pub const THEOREM_RATIO_DEFAULT: f64 = 10.0;

/// Energy-identity residual threshold. The residual is a centered
/// finite-difference of the energy against the exact balance, so it
/// scales as `sample_dt^2`; calibrated to 1e-4 at `sample_dt` = 1e-3.
pub fn energy_identity(sample_dt: f64) -> f64 {
    1e-4 * (sample_dt / 1e-3).powi(2)
}
