//! Check statistics. Each function reduces one trajectory (or one streak
//! series) to a single dimensionless number compared against a threshold:
//! relative residuals for exact identities, normalized overshoot for
//! proved envelopes. Zero initial data yields statistic 0 by convention.

use num_complex::Complex;
use strat_lab_core::{
    check_energy_identity, hyperbolic_bounds_check, liftup_baseline, KernelParams64,
    NonzeroModeState64, PhysParams64, Result, StreakRun64, StreakState64, Trajectory64,
};

fn sheared_amp(state: &NonzeroModeState64) -> f64 {
    (state.q.norm_sqr() + state.theta.norm_sqr() + state.u1.norm_sqr() + state.u3.norm_sqr())
        .sqrt()
}

fn streak_amp(state: &StreakState64) -> f64 {
    (state.u1.norm_sqr() + state.u2.norm_sqr() + state.u3.norm_sqr() + state.theta.norm_sqr())
        .sqrt()
}

/// Positive part of `(value - bound) / bound`, guarded against a zero
/// bound (zero data decays to an exactly zero envelope).
fn overshoot(value: f64, bound: f64) -> f64 {
    ((value - bound) / (bound + 1e-300)).max(0.0)
}

/// Max over samples of the divergence residual relative to the initial
/// amplitude. The residual is conserved exactly by the equations, so any
/// growth is integrator error.
pub fn divergence_statistic(traj: &Trajectory64) -> f64 {
    let amp0 = sheared_amp(&traj.states[0]);
    if amp0 == 0.0 {
        return 0.0;
    }
    traj.diagnostics
        .iter()
        .fold(0.0f64, |m, d| m.max(d.divergence_residual))
        / amp0
}

/// Max over samples and the five proved bounds of the normalized
/// overshoot: symmetrized norm below the crude and the sharp envelope,
/// sharp below crude, |u1| and |u3| below their mixing envelopes.
/// None when the trajectory carries no envelopes (dissipation gate off).
///
/// `noise_rel` is the integrator's relative resolution: the envelopes
/// decay like exp(-c t^3) and eventually drop below what any finite
/// tolerance can resolve, so dominance of a computed value is asserted
/// only while an envelope exceeds `noise_rel` (amplitude scale; squared
/// for the squared-norm bounds) of its initial value. The analytic
/// sharp-below-crude comparison carries no integration noise and is
/// checked at every sample.
pub fn envelope_statistic(traj: &Trajectory64, noise_rel: f64) -> Option<f64> {
    // Floors never drop below the smallest normal: an envelope whose own
    // construction underflowed (squared norms of far-tail data) is
    // identically zero and carries nothing to compare against.
    let d0 = &traj.diagnostics[0];
    let sym_floor = (d0.envelope_sym? * noise_rel * noise_rel).max(f64::MIN_POSITIVE);
    let u1_floor = (d0.envelope_u1? * noise_rel).max(f64::MIN_POSITIVE);
    let u3_floor = (d0.envelope_u3? * noise_rel).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (d, s) in traj.diagnostics.iter().zip(&traj.states) {
        let env = d.envelope_sym?;
        let sharp = d.envelope_sym_sharp?;
        let eu1 = d.envelope_u1?;
        let eu3 = d.envelope_u3?;
        worst = worst.max(overshoot(sharp, env));
        if env >= sym_floor {
            worst = worst.max(overshoot(d.sym_norm_sq, env));
        }
        if sharp >= sym_floor {
            worst = worst.max(overshoot(d.sym_norm_sq, sharp));
        }
        if eu1 >= u1_floor {
            worst = worst.max(overshoot(s.u1.norm(), eu1));
        }
        if eu3 >= u3_floor {
            worst = worst.max(overshoot(s.u3.norm(), eu3));
        }
    }
    Some(worst)
}

/// Energy-balance residual relative to the peak energy along the run.
pub fn energy_statistic(traj: &Trajectory64, params: &PhysParams64) -> Result<f64> {
    let residual = check_energy_identity(traj, &traj.mode, params)?;
    let max_e = traj
        .diagnostics
        .iter()
        .filter_map(|d| d.energy)
        .fold(0.0f64, f64::max);
    Ok(residual / max_e.max(1e-300))
}

/// Max over samples of `|eta u2 + l u3|` (the k = 0 divergence) relative
/// to the initial amplitude.
pub fn streak_divergence_statistic(run: &StreakRun64) -> f64 {
    let amp0 = streak_amp(&run.states[0]);
    if amp0 == 0.0 {
        return 0.0;
    }
    let l = f64::from(run.l);
    run.states
        .iter()
        .fold(0.0f64, |m, s| m.max((s.u2 * run.eta + s.u3 * l).norm()))
        / amp0
}

/// Validates the unstratified lift-up peak law on the run's u2 data:
/// with u1(0) zeroed, `max_t |u1(t)|` of the beta = 0 reference flow must
/// equal `|u2(0)| / (e nu n^2)`. Returns the relative error of the
/// densely sampled peak against the closed form; 0 when u2(0) = 0.
pub fn liftup_statistic(
    initial: &StreakState64,
    params: &PhysParams64,
    eta: f64,
    l: i32,
) -> Result<f64> {
    let u2_amp = initial.u2.norm();
    if u2_amp == 0.0 {
        return Ok(0.0);
    }
    let reference = StreakState64 {
        u1: Complex::new(0.0, 0.0),
        ..*initial
    };
    let n2 = eta * eta + f64::from(l) * f64::from(l);
    let horizon = 5.0 / (params.nu * n2);
    let mut peak = 0.0f64;
    for i in 0..=4000 {
        let t = horizon * f64::from(i) / 4000.0;
        let state = liftup_baseline(&reference, t, params.nu, params.kappa, eta, l)?;
        peak = peak.max(state.u1.norm());
    }
    let exact = u2_amp / (core::f64::consts::E * params.nu * n2);
    Ok((peak / exact - 1.0).abs())
}

/// Overshoot of the damped coshc/sinhc caps for the kernel the streak
/// propagator uses at (eta, l), sampled through 100 characteristic times.
/// Exact zero is expected; any positive value is a violation.
pub fn hyperbolic_statistic(params: &PhysParams64, eta: f64, l: i32) -> Result<f64> {
    let kp = KernelParams64::from_physics(params, eta, l)?;
    let scale = if kp.a > 0.0 { kp.a.min(kp.b) } else { kp.b };
    let horizon = 100.0 / scale;
    let times: Vec<f64> = (0..=400).map(|i| horizon * f64::from(i) / 400.0).collect();
    Ok(hyperbolic_bounds_check(&kp, &times))
}
