//! Closed-form propagation of streak (k = 0) modes.
//!
//! In scaled variables the streak system is block triangular: a 2x2
//! oscillator-with-decay block M drives (u2, theta), and a diagonal heat
//! block N drives (u1, u3) through the coupling S = diag(1, eta). All
//! propagators here are exact up to the floating-point evaluation of the
//! hyperbolic kernels.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kernels::{exp_coshc, exp_sinhc};
use crate::params::PhysParams;
use crate::scalar::Scalar;

/// Complex amplitudes of one streak mode at (eta, l). When l = 0,
/// incompressibility forces u2 = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreakState<T> {
    pub u1: Complex<T>,
    pub u2: Complex<T>,
    pub u3: Complex<T>,
    pub theta: Complex<T>,
}

impl<T: Scalar> StreakState<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        StreakState {
            u1: z,
            u2: z,
            u3: z,
            theta: z,
        }
    }

    /// Euclidean norm of the stacked real components.
    pub fn amplitude(&self) -> T {
        (self.u1.norm_sqr() + self.u2.norm_sqr() + self.u3.norm_sqr() + self.theta.norm_sqr())
            .sqrt()
    }
}

/// Scaled streak variables; defined only for l != 0 and beta > 0 (h0
/// carries 1/(beta l) with the signed l).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreakScaled<T> {
    pub f0: Complex<T>,
    pub h0: Complex<T>,
    pub g0: Complex<T>,
    pub gamma0: Complex<T>,
}

/// Rates of the 2x2 block: a = |nu - kappa| |eta,l|^2 / 2, b = beta |l| / |eta,l|,
/// c_squared = a^2 - b^2 (negative in the oscillatory regime).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams<T> {
    pub a: T,
    pub b: T,
    pub c_squared: T,
}

impl<T: Scalar> KernelParams<T> {
    pub fn from_rates(a: T, b: T) -> Result<Self> {
        if !(a >= T::zero()) || !a.is_finite() {
            return Err(Error::validation("a", "must be finite and >= 0"));
        }
        if !(b > T::zero()) || !b.is_finite() {
            return Err(Error::validation("b", "must be finite and > 0"));
        }
        Ok(KernelParams {
            a,
            b,
            c_squared: a * a - b * b,
        })
    }

    pub fn from_physics(params: &PhysParams<T>, eta: T, l: i32) -> Result<Self> {
        require_spanwise(l)?;
        require_buoyancy(params)?;
        let n2 = norm_sq(eta, l);
        let a = (params.nu - params.kappa).abs() * n2 / T::of(2.0);
        let b = params.beta * T::of_i32(l.abs()) / n2.sqrt();
        Self::from_rates(a, b)
    }
}

fn norm_sq<T: Scalar>(eta: T, l: i32) -> T {
    eta * eta + T::of_i32(l * l)
}

fn require_spanwise(l: i32) -> Result<()> {
    if l == 0 {
        return Err(Error::DegenerateMode {
            k: 0,
            l,
            reason: "scaled streak variables need l != 0".to_string(),
        });
    }
    Ok(())
}

fn require_buoyancy<T: Scalar>(params: &PhysParams<T>) -> Result<()> {
    if !(params.beta > T::zero()) {
        return Err(Error::validation(
            "beta",
            "scaled streak variables need beta > 0 (h0 carries 1/(beta l))",
        ));
    }
    Ok(())
}

fn require_nondegenerate<T: Scalar>(eta: T, l: i32) -> Result<()> {
    if l == 0 && eta == T::zero() {
        return Err(Error::DegenerateMode {
            k: 0,
            l,
            reason: "(eta, l) = (0, 0) carries no dynamics".to_string(),
        });
    }
    Ok(())
}

fn require_incompressible<T: Scalar>(state: &StreakState<T>, l: i32) -> Result<()> {
    if l == 0 && state.u2.norm_sqr() != T::zero() {
        return Err(Error::validation(
            "u2",
            "l = 0 streak must have u2 = 0 (incompressibility)",
        ));
    }
    Ok(())
}

/// Maps physical streak amplitudes to the scaled block variables.
pub fn scale_streak<T: Scalar>(
    state: &StreakState<T>,
    params: &PhysParams<T>,
    eta: T,
    l: i32,
) -> Result<StreakScaled<T>> {
    require_spanwise(l)?;
    require_buoyancy(params)?;
    let n = norm_sq(eta, l).sqrt();
    let labs = T::of_i32(l.abs());
    let w_vert = n * n.sqrt() / labs.sqrt();
    let w_theta = (n * labs).sqrt();
    // |eta,l|^(5/2) |l|^(1/2) / (beta l), signed l.
    let w_span = n * n * n.sqrt() * labs.sqrt() / (params.beta * T::of_i32(l));
    Ok(StreakScaled {
        f0: -state.u1 * w_vert,
        h0: state.u3 * w_span,
        g0: state.u2 * w_vert,
        gamma0: state.theta * w_theta,
    })
}

/// Inverse of [`scale_streak`].
pub fn unscale_streak<T: Scalar>(
    scaled: &StreakScaled<T>,
    params: &PhysParams<T>,
    eta: T,
    l: i32,
) -> Result<StreakState<T>> {
    require_spanwise(l)?;
    require_buoyancy(params)?;
    let n = norm_sq(eta, l).sqrt();
    let labs = T::of_i32(l.abs());
    let w_vert = n * n.sqrt() / labs.sqrt();
    let w_theta = (n * labs).sqrt();
    let w_span = n * n * n.sqrt() * labs.sqrt() / (params.beta * T::of_i32(l));
    Ok(StreakState {
        u1: -scaled.f0 / w_vert,
        u2: scaled.g0 / w_vert,
        u3: scaled.h0 / w_span,
        theta: scaled.gamma0 / w_theta,
    })
}

/// Exponential of the 2x2 block M = (-nu n^2, -b; b, -kappa n^2) at time t:
/// `e^(mu t) (coshc - d sinhc, -b sinhc; b sinhc, coshc + d sinhc)` with
/// `mu = -(nu+kappa) n^2 / 2`, `d = (nu-kappa) n^2 / 2` (signed).
pub fn exp_m<T: Scalar>(
    t: T,
    kp: &KernelParams<T>,
    params: &PhysParams<T>,
    eta: T,
    l: i32,
) -> Result<[[T; 2]; 2]> {
    require_spanwise(l)?;
    require_buoyancy(params)?;
    let n2 = norm_sq(eta, l);
    let mu = -(params.nu + params.kappa) * n2 / T::of(2.0);
    let d = (params.nu - params.kappa) * n2 / T::of(2.0);
    let ec = exp_coshc(mu, kp.c_squared, t);
    let es = exp_sinhc(mu, kp.c_squared, t);
    Ok([
        [ec - d * es, -kp.b * es],
        [kp.b * es, ec + d * es],
    ])
}

/// The forcing block (N - M)^(-1) (e^(Nt) - e^(Mt)) = (m11, m12; -m12, m22):
/// `m11 = ((nu-kappa) n^2 / b^2)(e^(mu t) phi_minus - e^(-nu n^2 t)) + e^(mu t) sinhc`,
/// `m12 = (1/b)(e^(mu t) phi_minus - e^(-nu n^2 t))`, `m22 = e^(mu t) sinhc`,
/// with `phi_minus = coshc - d sinhc`. Zero at t = 0.
pub fn coupling_block<T: Scalar>(
    t: T,
    kp: &KernelParams<T>,
    params: &PhysParams<T>,
    eta: T,
    l: i32,
) -> Result<[[T; 2]; 2]> {
    require_spanwise(l)?;
    require_buoyancy(params)?;
    let n2 = norm_sq(eta, l);
    let mu = -(params.nu + params.kappa) * n2 / T::of(2.0);
    let d = (params.nu - params.kappa) * n2 / T::of(2.0);
    let es = exp_sinhc(mu, kp.c_squared, t);
    let phi_minus_scaled = exp_coshc(mu, kp.c_squared, t) - d * es;
    let heat = (-params.nu * n2 * t).exp();
    let m12 = (phi_minus_scaled - heat) / kp.b;
    let m11 = (params.nu - params.kappa) * n2 / (kp.b * kp.b) * (phi_minus_scaled - heat) + es;
    Ok([[m11, m12], [-m12, es]])
}

fn apply2<T: Scalar>(m: &[[T; 2]; 2], v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    [
        v[0] * m[0][0] + v[1] * m[0][1],
        v[0] * m[1][0] + v[1] * m[1][1],
    ]
}

/// Propagates a streak mode from 0 to t in closed form. For l != 0 this
/// composes scale -> block solution -> unscale; for l = 0 the components
/// decouple into scalar heat flows with u2 identically zero.
pub fn propagate_streak<T: Scalar>(
    initial: &StreakState<T>,
    t: T,
    params: &PhysParams<T>,
    eta: T,
    l: i32,
) -> Result<StreakState<T>> {
    require_nondegenerate(eta, l)?;
    require_incompressible(initial, l)?;
    let n2 = norm_sq(eta, l);
    if l == 0 {
        let heat_nu = (-params.nu * n2 * t).exp();
        let heat_kappa = (-params.kappa * n2 * t).exp();
        return Ok(StreakState {
            u1: initial.u1 * heat_nu,
            u2: Complex::new(T::zero(), T::zero()),
            u3: initial.u3 * heat_nu,
            theta: initial.theta * heat_kappa,
        });
    }
    let kp = KernelParams::from_physics(params, eta, l)?;
    let scaled = scale_streak(initial, params, eta, l)?;
    let em = exp_m(t, &kp, params, eta, l)?;
    let cb = coupling_block(t, &kp, params, eta, l)?;
    let heat = (-params.nu * n2 * t).exp();
    let gg = apply2(&em, [scaled.g0, scaled.gamma0]);
    let forced = apply2(&cb, [scaled.g0, scaled.gamma0]);
    let advanced = StreakScaled {
        f0: scaled.f0 * heat + forced[0],
        h0: scaled.h0 * heat + forced[1] * eta,
        g0: gg[0],
        gamma0: gg[1],
    };
    unscale_streak(&advanced, params, eta, l)
}

/// Reference transient-growth solution without buoyancy:
/// `u(t) = e^(-nu n^2 t) (u1(0) - t u2(0), u2(0), u3(0))` and
/// `theta(t) = e^(-kappa n^2 t) theta(0)`. The u1 peak `|u2(0)|/(e nu n^2)`
/// is the lift-up amplification that buoyancy suppresses.
pub fn liftup_baseline<T: Scalar>(
    initial: &StreakState<T>,
    t: T,
    nu: T,
    kappa: T,
    eta: T,
    l: i32,
) -> Result<StreakState<T>> {
    require_nondegenerate(eta, l)?;
    require_incompressible(initial, l)?;
    let n2 = norm_sq(eta, l);
    let heat_nu = (-nu * n2 * t).exp();
    let heat_kappa = (-kappa * n2 * t).exp();
    Ok(StreakState {
        u1: (initial.u1 - initial.u2 * t) * heat_nu,
        u2: initial.u2 * heat_nu,
        u3: initial.u3 * heat_nu,
        theta: initial.theta * heat_kappa,
    })
}

/// Max positive excess over the kernel bounds `e^(-at) coshc <= 2` and
/// `e^(-at) sinhc <= 2 / max(a, b)`; zero when both hold at every sample.
pub fn hyperbolic_bounds_check<T: Scalar>(kp: &KernelParams<T>, t_samples: &[T]) -> T {
    let cap_sinhc = T::of(2.0) / kp.a.max(kp.b);
    let two = T::of(2.0);
    let mut worst = T::zero();
    for &t in t_samples {
        let ec = exp_coshc(-kp.a, kp.c_squared, t);
        let es = exp_sinhc(-kp.a, kp.c_squared, t);
        worst = worst.max(ec - two).max(es - cap_sinhc);
    }
    worst.max(T::zero())
}

/// Initial-data coefficient combinations bounding each component times
/// `e^(+min(nu,kappa) n^2 t)`, up to one uniform constant fitted in the
/// verification suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreakBoundCoefficients<T> {
    pub u1: T,
    pub u2: T,
    pub u3: T,
    pub theta: T,
}

pub fn streak_pointwise_bound<T: Scalar>(
    initial: &StreakState<T>,
    params: &PhysParams<T>,
    eta: T,
    l: i32,
) -> Result<StreakBoundCoefficients<T>> {
    require_spanwise(l)?;
    require_buoyancy(params)?;
    let n2 = norm_sq(eta, l);
    let n = n2.sqrt();
    let labs = T::of_i32(l.abs());
    let u1_0 = initial.u1.norm();
    let u2_0 = initial.u2.norm();
    let u3_0 = initial.u3.norm();
    let th_0 = initial.theta.norm();
    Ok(StreakBoundCoefficients {
        u1: u1_0
            + n2 * n2 / (params.beta * labs * labs) * u2_0
            + (u2_0 + th_0) / params.beta,
        u2: u2_0 + labs / n * th_0,
        u3: u3_0 + eta.abs() / labs * u2_0 + eta.abs() / n * th_0,
        theta: n / labs * u2_0 + th_0,
    })
}

/// Right-hand side of the physical streak system; shared by the derivative
/// consistency tests and the integration oracle.
pub fn streak_rhs<T: Scalar>(
    state: &StreakState<T>,
    params: &PhysParams<T>,
    eta: T,
    l: i32,
) -> StreakState<T> {
    let n2 = norm_sq(eta, l);
    let lf = T::of_i32(l);
    StreakState {
        u1: -state.u2 - state.u1 * (params.nu * n2),
        u2: -state.theta * (params.beta * lf * lf / n2) - state.u2 * (params.nu * n2),
        u3: state.theta * (params.beta * eta * lf / n2) - state.u3 * (params.nu * n2),
        theta: state.u2 * params.beta - state.theta * (params.kappa * n2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(nu: f64, kappa: f64, beta: f64) -> PhysParams<f64> {
        PhysParams::new(nu, kappa, beta).unwrap()
    }

    fn sample_state() -> StreakState<f64> {
        StreakState {
            u1: Complex::new(0.7, -0.2),
            u2: Complex::new(-0.4, 0.9),
            u3: Complex::new(0.3, 0.3),
            theta: Complex::new(-1.1, 0.5),
        }
    }

    fn state_diff(a: &StreakState<f64>, b: &StreakState<f64>) -> f64 {
        ((a.u1 - b.u1).norm_sqr()
            + (a.u2 - b.u2).norm_sqr()
            + (a.u3 - b.u3).norm_sqr()
            + (a.theta - b.theta).norm_sqr())
        .sqrt()
    }

    #[test]
    fn kernel_params_match_their_definition() {
        let pr = params(1e-2, 5e-2, 1.5);
        let kp = KernelParams::from_physics(&pr, 2.0, -1).unwrap();
        let n2 = 5.0;
        assert_relative_eq!(kp.a, 0.04 * n2 / 2.0, max_relative = 1e-15);
        assert_relative_eq!(kp.b, 1.5 / n2.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(kp.c_squared, kp.a * kp.a - kp.b * kp.b, max_relative = 1e-15);
        assert!(KernelParams::from_physics(&pr, 1.0, 0).is_err());
    }

    #[test]
    fn scaling_round_trips_exactly() {
        let pr = params(1e-2, 2e-2, 0.8);
        for l in [-2, -1, 1, 3] {
            for eta in [0.0, -1.5, 2.0] {
                let s = sample_state();
                let scaled = scale_streak(&s, &pr, eta, l).unwrap();
                let back = unscale_streak(&scaled, &pr, eta, l).unwrap();
                assert!(state_diff(&s, &back) < 1e-14 * s.amplitude());
            }
        }
    }

    #[test]
    fn scaled_variables_satisfy_the_block_system() {
        // d/dt (f, h, g, gamma) = ((N, S), (0, M)) (f, h, g, gamma) with
        // N = -nu n^2 I, S = diag(1, eta), M = (-nu n^2, -b; b, -kappa n^2).
        let pr = params(1e-2, 3e-2, 1.2);
        let (eta, l) = (0.7_f64, -2);
        let n2: f64 = norm_sq(eta, l);
        let b = pr.beta * 2.0 / n2.sqrt();
        let s = sample_state();
        let scaled = scale_streak(&s, &pr, eta, l).unwrap();
        let ds = streak_rhs(&s, &pr, eta, l);
        // The scaling weights are constant in t, so d(scaled)/dt is the
        // scaling of the derivative.
        let dscaled = scale_streak(&ds, &pr, eta, l).unwrap();
        let expect_df = scaled.f0 * (-pr.nu * n2) + scaled.g0;
        let expect_dh = scaled.h0 * (-pr.nu * n2) + scaled.gamma0 * eta;
        let expect_dg = scaled.g0 * (-pr.nu * n2) - scaled.gamma0 * b;
        let expect_dgamma = scaled.g0 * b + scaled.gamma0 * (-pr.kappa * n2);
        assert!((dscaled.f0 - expect_df).norm() < 1e-13);
        assert!((dscaled.h0 - expect_dh).norm() < 1e-13);
        assert!((dscaled.g0 - expect_dg).norm() < 1e-13);
        assert!((dscaled.gamma0 - expect_dgamma).norm() < 1e-13);
    }

    #[test]
    fn exp_m_is_identity_at_time_zero() {
        let pr = params(1e-2, 4e-2, 1.0);
        let kp = KernelParams::from_physics(&pr, 1.0, 2).unwrap();
        let m = exp_m(0.0, &kp, &pr, 1.0, 2).unwrap();
        assert_eq!(m, [[1.0, 0.0], [0.0, 1.0]]);
        let c = coupling_block(0.0, &kp, &pr, 1.0, 2).unwrap();
        assert_eq!(c, [[0.0, 0.0], [0.0, 0.0]]);
    }

    #[test]
    fn equal_diffusivities_give_rotation_times_decay() {
        let pr = params(2e-2, 2e-2, 1.3);
        let (eta, l) = (0.5, 1);
        let kp = KernelParams::from_physics(&pr, eta, l).unwrap();
        let n2 = norm_sq(eta, l);
        for t in [0.3, 1.7, 6.0] {
            let m = exp_m(t, &kp, &pr, eta, l).unwrap();
            let decay = (-pr.nu * n2 * t).exp();
            let (c, s) = ((kp.b * t).cos(), (kp.b * t).sin());
            assert_relative_eq!(m[0][0], decay * c, max_relative = 1e-12);
            assert_relative_eq!(m[0][1], -decay * s, max_relative = 1e-12);
            assert_relative_eq!(m[1][0], decay * s, max_relative = 1e-12);
            assert_relative_eq!(m[1][1], decay * c, max_relative = 1e-12);
        }
    }

    #[test]
    fn exp_m_satisfies_semigroup_and_determinant_identities() {
        let pr = params(1e-3, 5e-2, 0.75);
        let (eta, l) = (-1.0, 2);
        let kp = KernelParams::from_physics(&pr, eta, l).unwrap();
        let n2 = norm_sq(eta, l);
        for (t, s) in [(0.4, 0.9), (2.0, 3.5), (10.0, 7.0)] {
            let mts = exp_m(t + s, &kp, &pr, eta, l).unwrap();
            let mt = exp_m(t, &kp, &pr, eta, l).unwrap();
            let ms = exp_m(s, &kp, &pr, eta, l).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let prod = mt[i][0] * ms[0][j] + mt[i][1] * ms[1][j];
                    assert_relative_eq!(mts[i][j], prod, max_relative = 1e-10, epsilon = 1e-14);
                }
            }
            let det = mt[0][0] * mt[1][1] - mt[0][1] * mt[1][0];
            assert_relative_eq!(det, (-(pr.nu + pr.kappa) * n2 * t).exp(), max_relative = 1e-10);
        }
    }

    #[test]
    fn coupling_block_starts_linearly_when_diffusivities_match() {
        // nu = kappa kills the (nu - kappa) term: m11 = e^(mu t) sinhc = t + O(t^2).
        let pr = params(1e-2, 1e-2, 1.0);
        let (eta, l) = (0.3, 1);
        let kp = KernelParams::from_physics(&pr, eta, l).unwrap();
        let t = 1e-4;
        let c = coupling_block(t, &kp, &pr, eta, l).unwrap();
        assert_relative_eq!(c[0][0] / t, 1.0, max_relative = 1e-3);
        assert_eq!(c[1][0], -c[0][1]);
    }

    #[test]
    fn propagate_is_the_identity_at_time_zero() {
        let pr = params(1e-2, 3e-2, 1.1);
        let s = sample_state();
        let out = propagate_streak(&s, 0.0, &pr, 0.8, 2).unwrap();
        assert!(state_diff(&s, &out) < 1e-14);
    }

    #[test]
    fn propagate_matches_equal_diffusivity_oscillation() {
        // u2(0) = A, theta(0) = 0, nu = kappa: the (u2, theta) pair rotates at
        // frequency b under the common heat decay, with theta picking up the
        // amplitude ratio n/|l| from the scaling weights. At eta = 0 the ratio
        // is 1.
        let pr = params(1.5e-2, 1.5e-2, 0.9);
        let amp = 0.8;
        let mut init = StreakState::zero();
        init.u2 = Complex::new(amp, 0.0);
        for (eta, l) in [(0.0_f64, 1_i32), (1.2, 2)] {
            let n2 = norm_sq(eta, l);
            let b = pr.beta * (l.abs() as f64) / n2.sqrt();
            for t in [0.5, 2.0, 9.0] {
                let out = propagate_streak(&init, t, &pr, eta, l).unwrap();
                let decay = (-pr.nu * n2 * t).exp();
                assert_relative_eq!(out.u2.re, amp * decay * (b * t).cos(), epsilon = 1e-12);
                let ratio = n2.sqrt() / (l.abs() as f64);
                assert_relative_eq!(
                    out.theta.re,
                    amp * ratio * decay * (b * t).sin(),
                    epsilon = 1e-12
                );
                assert_relative_eq!(out.u2.im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn propagate_derivative_matches_the_physical_system() {
        // One-sided second-order difference of the propagator at t = 0
        // against the raw right-hand side.
        let pr = params(1e-2, 4e-2, 1.5);
        for (eta, l) in [(0.0, 1), (0.7, -2), (-1.3, 3)] {
            let s = sample_state();
            let h = 1e-5;
            let y1 = propagate_streak(&s, h, &pr, eta, l).unwrap();
            let y2 = propagate_streak(&s, 2.0 * h, &pr, eta, l).unwrap();
            let rhs = streak_rhs(&s, &pr, eta, l);
            let fd = |f0: Complex<f64>, f1: Complex<f64>, f2: Complex<f64>| {
                (f0 * -3.0 + f1 * 4.0 - f2) / (2.0 * h)
            };
            assert!((fd(s.u1, y1.u1, y2.u1) - rhs.u1).norm() < 1e-7);
            assert!((fd(s.u2, y1.u2, y2.u2) - rhs.u2).norm() < 1e-7);
            assert!((fd(s.u3, y1.u3, y2.u3) - rhs.u3).norm() < 1e-7);
            assert!((fd(s.theta, y1.theta, y2.theta) - rhs.theta).norm() < 1e-7);
        }
    }

    #[test]
    fn propagate_is_linear_in_the_initial_state() {
        let pr = params(2e-2, 1e-2, 0.75);
        let (eta, l, t) = (0.6, 2, 3.0);
        let s1 = sample_state();
        let mut s2 = StreakState::zero();
        s2.u1 = Complex::new(-0.3, 0.8);
        s2.theta = Complex::new(0.9, 0.1);
        let combo = StreakState {
            u1: s1.u1 * 2.0 + s2.u1 * -0.5,
            u2: s1.u2 * 2.0 + s2.u2 * -0.5,
            u3: s1.u3 * 2.0 + s2.u3 * -0.5,
            theta: s1.theta * 2.0 + s2.theta * -0.5,
        };
        let p1 = propagate_streak(&s1, t, &pr, eta, l).unwrap();
        let p2 = propagate_streak(&s2, t, &pr, eta, l).unwrap();
        let pc = propagate_streak(&combo, t, &pr, eta, l).unwrap();
        let expected = StreakState {
            u1: p1.u1 * 2.0 + p2.u1 * -0.5,
            u2: p1.u2 * 2.0 + p2.u2 * -0.5,
            u3: p1.u3 * 2.0 + p2.u3 * -0.5,
            theta: p1.theta * 2.0 + p2.theta * -0.5,
        };
        assert!(state_diff(&pc, &expected) < 1e-12);
    }

    #[test]
    fn propagate_is_continuous_across_equal_diffusivities() {
        let (eta, l, t) = (0.4, 1, 5.0);
        let s = sample_state();
        let eps = 1e-9;
        let above = propagate_streak(&s, t, &params(1e-2 + eps, 1e-2, 1.0), eta, l).unwrap();
        let below = propagate_streak(&s, t, &params(1e-2 - eps, 1e-2, 1.0), eta, l).unwrap();
        assert!(state_diff(&above, &below) < 1e-7);
    }

    #[test]
    fn l_zero_components_decay_as_heat_flows() {
        let pr = params(1e-2, 3e-2, 1.0);
        let mut s = sample_state();
        s.u2 = Complex::new(0.0, 0.0);
        let (eta, t) = (1.5, 4.0);
        let out = propagate_streak(&s, t, &pr, eta, 0).unwrap();
        let heat_nu = (-pr.nu * eta * eta * t).exp();
        let heat_kappa = (-pr.kappa * eta * eta * t).exp();
        assert!((out.u1 - s.u1 * heat_nu).norm() < 1e-15);
        assert!((out.u3 - s.u3 * heat_nu).norm() < 1e-15);
        assert!((out.theta - s.theta * heat_kappa).norm() < 1e-15);
        assert_eq!(out.u2.norm_sqr(), 0.0);
        // Nonzero u2 at l = 0 violates incompressibility.
        assert!(propagate_streak(&sample_state(), t, &pr, eta, 0).is_err());
        assert!(propagate_streak(&s, t, &pr, 0.0, 0).is_err());
    }

    #[test]
    fn baseline_reproduces_the_transient_peak() {
        let nu = 1e-3;
        let (eta, l) = (0.0, 1);
        let mut init = StreakState::zero();
        init.u2 = Complex::new(1.0, 0.0);
        let t_star = 1.0 / nu;
        let peak = liftup_baseline(&init, t_star, nu, nu, eta, l).unwrap();
        assert_relative_eq!(peak.u1.norm(), 1.0 / (std::f64::consts::E * nu), max_relative = 1e-12);
        // The peak time maximizes |u1|.
        for t in [0.5 * t_star, 0.9 * t_star, 1.1 * t_star, 2.0 * t_star] {
            let other = liftup_baseline(&init, t, nu, nu, eta, l).unwrap();
            assert!(other.u1.norm() <= peak.u1.norm());
        }
        let zero = liftup_baseline(&init, 0.0, nu, nu, eta, l).unwrap();
        assert!(state_diff(&zero, &init) < 1e-15);
    }

    #[test]
    fn baseline_decays_theta_at_its_own_rate() {
        let mut init = StreakState::zero();
        init.theta = Complex::new(0.0, 2.0);
        let out = liftup_baseline(&init, 3.0, 1e-2, 5e-2, 1.0, 1).unwrap();
        assert_relative_eq!(out.theta.im, 2.0 * (-5e-2_f64 * 2.0 * 3.0).exp(), max_relative = 1e-14);
    }

    #[test]
    fn hyperbolic_bounds_hold_on_representative_kernels() {
        let ts: Vec<f64> = (0..400).map(|i| i as f64 * 0.25).collect();
        for (a, b) in [(0.0, 1.0), (0.5, 0.5), (2.0, 0.1), (1e-3, 3.0), (10.0, 9.99)] {
            let kp = KernelParams::from_rates(a, b).unwrap();
            assert_eq!(hyperbolic_bounds_check(&kp, &ts), 0.0, "a={}, b={}", a, b);
        }
    }

    #[test]
    fn pointwise_bound_coefficients_follow_the_displays() {
        let pr = params(1e-2, 2e-2, 2.0);
        let mut init = StreakState::zero();
        init.u2 = Complex::new(3.0, 4.0);
        init.theta = Complex::new(0.0, 1.0);
        // eta = 0: n = |l|, the u2/theta coefficients collapse to sums.
        let b0 = streak_pointwise_bound(&init, &pr, 0.0, 2).unwrap();
        assert_relative_eq!(b0.u2, 5.0 + 1.0, max_relative = 1e-14);
        assert_relative_eq!(b0.theta, 5.0 + 1.0, max_relative = 1e-14);
        assert_relative_eq!(b0.u3, 0.0, epsilon = 1e-15);
        // n^4/(beta l^2) u2 + (u2 + theta)/beta with n^2 = 4.
        assert_relative_eq!(b0.u1, 16.0 / 8.0 * 5.0 + 6.0 / 2.0, max_relative = 1e-14);
        let zero = streak_pointwise_bound(&StreakState::zero(), &pr, 1.0, 1).unwrap();
        assert_eq!((zero.u1, zero.u2, zero.u3, zero.theta), (0.0, 0.0, 0.0, 0.0));
        assert!(streak_pointwise_bound(&init, &pr, 1.0, 0).is_err());
    }

    #[test]
    fn kernel_helpers_cover_both_branches() {
        use crate::kernels::{coshc_stable, sinhc_stable};
        assert_relative_eq!(sinhc_stable(4.0, 1.0), 2.0_f64.sinh() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(coshc_stable(-4.0, 1.0), 2.0_f64.cos(), max_relative = 1e-14);
    }
}
