//! Time integration of sheared (k != 0) modes with energy and envelope
//! diagnostics.
//!
//! State layout is `(q, theta, u1, u3)` with `u2 = -q/p` eliminated through
//! incompressibility. Two drivers share the same embedded Runge-Kutta step:
//! a plain explicit one, and an integrating-factor variant that absorbs the
//! stiff diagonal decay `exp(-nu int p)`, `exp(-kappa int p)` exactly and
//! integrates only the coupling terms.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::mode::ModeIndex;
use crate::ode::{self, AdaptiveOptions};
use crate::params::{rate_constants, PhysParams, RateConstants};
use crate::scalar::Scalar;
use crate::symbol::{integral_p, symbol_p, symbol_p_prime, symbol_ratio, symbol_ratio_derivative};
use crate::symmetrize::{to_symmetric, NonzeroModeState, SymmetricState};

/// Step driver selection. The integrating factor pays one `integral_p`
/// evaluation per stage to remove the `nu p`, `kappa p` stiffness, which wins
/// on long horizons where p grows like k^2 t^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Explicit,
    IntegratingFactor,
}

/// Integration tolerances, horizon, and output cadence.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    pub t_end: T,
    pub sample_dt: T,
    pub method: Method,
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("t_end", self.t_end),
            ("sample_dt", self.sample_dt),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::validation(name, "must be positive and finite"));
            }
        }
        if self.sample_dt > self.t_end {
            return Err(Error::validation(
                "sample_dt",
                "must not exceed t_end (need at least one sample)",
            ));
        }
        Ok(())
    }

    /// Defaults with the horizon set by [`default_t_end`] and 256 samples.
    pub fn default_for(params: &PhysParams<T>, mode: &ModeIndex<T>) -> Self {
        let t_end = default_t_end(params, mode);
        IntegratorConfig {
            rel_tol: T::of(1e-9),
            abs_tol: T::of(1e-12),
            max_step: T::of(0.25),
            t_end,
            sample_dt: t_end / T::of(256.0),
            method: Method::Explicit,
        }
    }
}

/// Three e-foldings of the dominant decay: `3 (12 / (lambda k^2))^(1/3)`
/// when the rate constants exist, else three plain heat times at the mode's
/// horizontal frequency.
pub fn default_t_end<T: Scalar>(params: &PhysParams<T>, mode: &ModeIndex<T>) -> T {
    let k2 = T::of_i32(mode.k * mode.k);
    match rate_constants(params) {
        Ok(r) if mode.k != 0 => {
            T::of(3.0) * (T::of(12.0) / (r.lambda * k2)).powf(T::of(1.0 / 3.0))
        }
        _ => T::of(3.0) / (params.min_diffusivity() * mode.kl_norm() * mode.kl_norm()),
    }
}

/// Per-sample diagnostics. Energy is populated only for `beta > 1/2` (where
/// it is coercive); envelopes only when the rate constants exist.
#[derive(Debug, Clone, Copy)]
pub struct SampleDiagnostics<T> {
    pub energy: Option<T>,
    pub sym_norm_sq: T,
    pub envelope_sym: Option<T>,
    pub envelope_sym_sharp: Option<T>,
    pub envelope_u1: Option<T>,
    pub envelope_u3: Option<T>,
    pub divergence_residual: T,
}

/// Sampled solution of one sheared mode; `times[0] = 0` holds the initial
/// state, and `times`, `states`, `diagnostics` are index-aligned.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub mode: ModeIndex<T>,
    pub times: Vec<T>,
    pub states: Vec<NonzeroModeState<T>>,
    pub diagnostics: Vec<SampleDiagnostics<T>>,
}

/// Right-hand side of the `(q, theta)` subsystem:
/// `dq = beta (k^2 + l^2) theta - nu p q`, `dtheta = -beta q / p - kappa p theta`.
pub fn rhs_qtheta<T: Scalar>(
    t: T,
    q: Complex<T>,
    theta: Complex<T>,
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
) -> (Complex<T>, Complex<T>) {
    let p = symbol_p(t, mode);
    let kl2 = T::of_i32(mode.k * mode.k + mode.l * mode.l);
    let dq = theta * (params.beta * kl2) - q * (params.nu * p);
    let dtheta = -q * (params.beta / p) - theta * (params.kappa * p);
    (dq, dtheta)
}

/// Right-hand side of the lifted components. The pressure terms
/// `-2k^2 q/p^2`, `-2kl q/p^2` are exactly the ones that keep
/// `k u1 + (eta - kt) u2 + l u3` invariant along the flow.
pub fn rhs_u1u3<T: Scalar>(
    t: T,
    state: &NonzeroModeState<T>,
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
) -> (Complex<T>, Complex<T>) {
    let p = symbol_p(t, mode);
    let k = T::of_i32(mode.k);
    let l = T::of_i32(mode.l);
    let shear_y = mode.eta - k * t;
    let q_p = state.q / p;
    let q_p2 = q_p / p;
    let th_p = state.theta * (params.beta * shear_y / p);
    let two = T::of(2.0);
    let du1 = -state.u1 * (params.nu * p) + q_p - q_p2 * (two * k * k) + th_p * k;
    let du3 = -state.u3 * (params.nu * p) - q_p2 * (two * k * l) + th_p * l;
    (du1, du3)
}

/// Right-hand side in the symmetrized variables: the buoyancy coupling
/// `beta |k,l| p^(-1/2)` is antisymmetric between g and gamma.
pub fn rhs_symmetric<T: Scalar>(
    t: T,
    s: &SymmetricState<T>,
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
) -> (Complex<T>, Complex<T>) {
    let p = symbol_p(t, mode);
    let quarter_ratio = T::of(0.25) * symbol_p_prime(t, mode) / p;
    let coupling = params.beta * mode.kl_norm() / p.sqrt();
    let dg = -s.g * quarter_ratio + s.gamma * coupling - s.g * (params.nu * p);
    let dgamma = s.gamma * quarter_ratio - s.g * coupling - s.gamma * (params.kappa * p);
    (dg, dgamma)
}

fn full_rhs<T: Scalar>(
    t: T,
    y: &[Complex<T>; 4],
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
) -> [Complex<T>; 4] {
    let state = NonzeroModeState {
        q: y[0],
        theta: y[1],
        u1: y[2],
        u3: y[3],
    };
    let (dq, dtheta) = rhs_qtheta(t, y[0], y[1], mode, params);
    let (du1, du3) = rhs_u1u3(t, &state, mode, params);
    [dq, dtheta, du1, du3]
}

fn require_sheared<T: Scalar>(mode: &ModeIndex<T>) -> Result<()> {
    if mode.k == 0 {
        return Err(Error::DegenerateMode {
            k: mode.k,
            l: mode.l,
            reason: "mode evolution is defined for sheared modes (k != 0)".to_string(),
        });
    }
    Ok(())
}

/// Integrates one sheared mode from `t = 0` to `cfg.t_end`, sampling every
/// `cfg.sample_dt` (the last step lands exactly on `t_end`).
///
/// The system is linear, so the initial state is rescaled to unit
/// amplitude before stepping and the scale restored on output:
/// `cfg.abs_tol` thereby acts relative to the initial amplitude, and
/// tolerances stay meaningful for grid-tail data whose raw magnitude
/// sits near or below the normal floating range.
pub fn integrate_mode<T: Scalar>(
    initial: &NonzeroModeState<T>,
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    require_sheared(mode)?;
    cfg.validate()?;
    let samples = sample_times(cfg);
    let y0 = [initial.q, initial.theta, initial.u1, initial.u3];
    // Component norms, not a squared sum: squaring tail amplitudes can
    // underflow to zero and lose the scale entirely.
    let amp0 = y0.iter().fold(T::zero(), |acc, v| acc + v.norm());
    let scale = if amp0 > T::zero() { amp0 } else { T::one() };
    let y0n = y0.map(|v| v / scale);
    let opts = AdaptiveOptions {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        max_step: cfg.max_step,
        step_floor: T::of(1e-12),
    };
    let solved = match cfg.method {
        Method::Explicit => ode::solve_sampled(
            |t, y: &[Complex<T>; 4]| full_rhs(t, y, mode, params),
            T::zero(),
            y0n,
            &samples,
            &opts,
        )?,
        Method::IntegratingFactor => integrating_factor_solve(mode, params, y0n, &samples, &opts)?,
    };

    let mut times = Vec::with_capacity(samples.len() + 1);
    let mut states = Vec::with_capacity(samples.len() + 1);
    times.push(T::zero());
    states.push(*initial);
    for (&t, y) in samples.iter().zip(&solved) {
        times.push(t);
        states.push(NonzeroModeState {
            q: y[0] * scale,
            theta: y[1] * scale,
            u1: y[2] * scale,
            u3: y[3] * scale,
        });
    }

    let rates = rate_constants(params).ok();
    let sym0 = to_symmetric(T::zero(), mode, initial)?;
    let init_norm2 = sym0.norm_sq();
    // Not sqrt(init_norm2): the square underflows for tail amplitudes
    // whose norm is representable, and the mixing envelopes would then
    // lose their dominant term while transient growth is real.
    let init_sym_norm = sym0.norm();
    let u1_init = initial.u1.norm();
    let u3_init = initial.u3.norm();
    let report_energy = params.beta > T::of(0.5);

    let mut diagnostics = Vec::with_capacity(times.len());
    for (&t, state) in times.iter().zip(&states) {
        let sym = to_symmetric(t, mode, state)?;
        let energy_val = if report_energy {
            Some(energy(t, &sym, mode, params)?)
        } else {
            None
        };
        let (env_sym, env_sharp, env_u1, env_u3) = match &rates {
            Some(r) => (
                Some(envelope_symmetric(t, mode, r, init_norm2)),
                Some(envelope_symmetric_sharp(t, mode, params, r, init_norm2)),
                Some(envelope_u1u3(t, mode, params, r, u1_init, init_sym_norm)),
                Some(envelope_u1u3(t, mode, params, r, u3_init, init_sym_norm)),
            ),
            None => (None, None, None, None),
        };
        diagnostics.push(SampleDiagnostics {
            energy: energy_val,
            sym_norm_sq: sym.norm_sq(),
            envelope_sym: env_sym,
            envelope_sym_sharp: env_sharp,
            envelope_u1: env_u1,
            envelope_u3: env_u3,
            divergence_residual: crate::symmetrize::divergence_residual(t, mode, state),
        });
    }

    Ok(Trajectory {
        mode: *mode,
        times,
        states,
        diagnostics,
    })
}

fn sample_times<T: Scalar>(cfg: &IntegratorConfig<T>) -> Vec<T> {
    let mut samples = Vec::new();
    let mut i = 1usize;
    // Stop one partial interval short of t_end, then land exactly on it.
    loop {
        let t = cfg.sample_dt * T::of_usize(i);
        if t >= cfg.t_end - cfg.sample_dt * T::of(1e-9) {
            break;
        }
        samples.push(t);
        i += 1;
    }
    samples.push(cfg.t_end);
    samples
}

/// Integrating-factor driver. Each step re-anchors the factor at the step's
/// start, so the stage exponents stay bounded by `exponent_cap` and the pure
/// decay part is propagated in closed form.
fn integrating_factor_solve<T: Scalar>(
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
    y0: [Complex<T>; 4],
    samples: &[T],
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<[Complex<T>; 4]>> {
    ode::validate_options(opts)?;
    let mut out = Vec::with_capacity(samples.len());
    let mut t = T::zero();
    let mut y = y0;
    let mut ctrl = ode::PiController::new();
    let mut h = T::of(1e-3).min(opts.max_step);
    let k = T::of_i32(mode.k);
    let l = T::of_i32(mode.l);
    let kl2 = T::of_i32(mode.k * mode.k + mode.l * mode.l);
    let two = T::of(2.0);
    for (i, &ts) in samples.iter().enumerate() {
        if ts <= t {
            return Err(Error::validation(
                "samples",
                format!("sample {} at t = {} is not increasing", i, ts),
            ));
        }
        while t < ts {
            let h_try = h
                .min(opts.max_step)
                .min(ts - t)
                .min(exponent_cap(t, ts - t, mode, params));
            if h_try < opts.step_floor {
                return Err(Error::StepSizeUnderflow {
                    t: t.to_f64().unwrap_or(f64::NAN),
                    h: h_try.to_f64().unwrap_or(f64::NAN),
                });
            }
            let ip0 = integral_p(t, mode);
            let mut f = |s: T, z: &[Complex<T>; 4]| {
                let tau = t + s;
                let dp = integral_p(tau, mode) - ip0;
                let decay_nu = (-params.nu * dp).exp();
                let decay_kappa = (-params.kappa * dp).exp();
                let q = z[0] * decay_nu;
                let theta = z[1] * decay_kappa;
                let p = symbol_p(tau, mode);
                let shear_y = mode.eta - k * tau;
                let q_p = q / p;
                let q_p2 = q_p / p;
                let th_p = theta * (params.beta * shear_y / p);
                // Coupling-only right-hand side; the diagonal decay lives in
                // the factor.
                let dq = theta * (params.beta * kl2);
                let dtheta = -q * (params.beta / p);
                let du1 = q_p - q_p2 * (two * k * k) + th_p * k;
                let du3 = -q_p2 * (two * k * l) + th_p * l;
                [
                    dq / decay_nu,
                    dtheta / decay_kappa,
                    du1 / decay_nu,
                    du3 / decay_nu,
                ]
            };
            let k1 = f(T::zero(), &y);
            let (z5, errv, _) = ode::rk_step(&mut f, T::zero(), h_try, &y, &k1);
            let err = ode::error_norm(&y, &z5, &errv, opts);
            let (accept, h_next) = ctrl.judge(err, h_try);
            if accept {
                let dp = integral_p(t + h_try, mode) - ip0;
                let decay_nu = (-params.nu * dp).exp();
                let decay_kappa = (-params.kappa * dp).exp();
                y = [
                    z5[0] * decay_nu,
                    z5[1] * decay_kappa,
                    z5[2] * decay_nu,
                    z5[3] * decay_nu,
                ];
                t = t + h_try;
            }
            h = h_next;
        }
        out.push(y);
    }
    Ok(out)
}

/// Largest step keeping `max(nu,kappa) * int p` over the step below 600, so
/// the inverse factor `exp(+nu dp)` cannot overflow. p restricted to the
/// step attains its max at an endpoint.
fn exponent_cap<T: Scalar>(t: T, remaining: T, mode: &ModeIndex<T>, params: &PhysParams<T>) -> T {
    let budget = T::of(600.0) / params.nu.max(params.kappa);
    let p_now = symbol_p(t, mode);
    let h0 = (budget / p_now).min(remaining);
    let p_far = symbol_p(t + h0, mode);
    h0.min(budget / p_now.max(p_far))
}

/// Pointwise energy `E = 1/2 [|g|^2 + |gamma|^2 + (1/2 beta) R Re(g conj(gamma))]`
/// with `R = p' / (|k,l| p^(1/2))`. Coercive exactly when `beta > 1/2`.
pub fn energy<T: Scalar>(
    t: T,
    s: &SymmetricState<T>,
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
) -> Result<T> {
    require_sheared(mode)?;
    if !(params.beta > T::zero()) {
        return Err(Error::validation(
            "beta",
            "energy functional needs beta > 0",
        ));
    }
    let x = s.g.norm_sqr();
    let y = s.gamma.norm_sqr();
    let w = (s.g * s.gamma.conj()).re;
    let r = symbol_ratio(t, mode);
    let half = T::of(0.5);
    Ok(half * (x + y + r * w / (two_beta(params))))
}

fn two_beta<T: Scalar>(params: &PhysParams<T>) -> T {
    T::of(2.0) * params.beta
}

/// Exact time derivative of [`energy`] along the symmetrized flow:
/// `dE = 1/2 (p'/p)(Y - X) + (1/4b) R' W - nu p X - kappa p Y - ((nu+kappa)/4b) R p W`
/// with `X = |g|^2`, `Y = |gamma|^2`, `W = Re(g conj(gamma))`, `b = beta`.
pub fn energy_identity_rhs<T: Scalar>(
    t: T,
    s: &SymmetricState<T>,
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
) -> Result<T> {
    require_sheared(mode)?;
    if !(params.beta > T::zero()) {
        return Err(Error::validation(
            "beta",
            "energy functional needs beta > 0",
        ));
    }
    let x = s.g.norm_sqr();
    let y = s.gamma.norm_sqr();
    let w = (s.g * s.gamma.conj()).re;
    let p = symbol_p(t, mode);
    let transport = T::of(0.5) * (symbol_p_prime(t, mode) / p) * (y - x);
    let four_beta = T::of(4.0) * params.beta;
    let ratio_term = symbol_ratio_derivative(t, mode) * w / four_beta;
    let cross = (params.nu + params.kappa) / four_beta * symbol_ratio(t, mode) * p * w;
    Ok(transport + ratio_term - params.nu * p * x - params.kappa * p * y - cross)
}

/// Max over interior samples of |centered-difference dE/dt - exact dE/dt|.
/// A small residual certifies energy, rhs_symmetric, and the integrator
/// against each other.
pub fn check_energy_identity<T: Scalar>(
    traj: &Trajectory<T>,
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
) -> Result<T> {
    if traj.times.len() < 3 {
        return Err(Error::InsufficientSampling {
            reason: format!(
                "energy identity needs at least 3 samples, got {}",
                traj.times.len()
            ),
        });
    }
    let mut energies = Vec::with_capacity(traj.times.len());
    let mut syms = Vec::with_capacity(traj.times.len());
    for (&t, state) in traj.times.iter().zip(&traj.states) {
        let sym = to_symmetric(t, mode, state)?;
        energies.push(energy(t, &sym, mode, params)?);
        syms.push(sym);
    }
    let mut max_residual = T::zero();
    for i in 1..traj.times.len() - 1 {
        let numeric = three_point_derivative(
            [traj.times[i - 1], traj.times[i], traj.times[i + 1]],
            [energies[i - 1], energies[i], energies[i + 1]],
        );
        let exact = energy_identity_rhs(traj.times[i], &syms[i], mode, params)?;
        max_residual = max_residual.max((numeric - exact).abs());
    }
    Ok(max_residual)
}

/// Derivative at the middle node of a quadratic through three (possibly
/// unevenly spaced) points.
fn three_point_derivative<T: Scalar>(t: [T; 3], f: [T; 3]) -> T {
    let d01 = t[0] - t[1];
    let d02 = t[0] - t[2];
    let d12 = t[1] - t[2];
    f[0] * d12 / (d01 * d02) + f[1] * (d01 - d12) / (d01 * d12) + f[2] * d01 / (d02 * -d12)
}

/// Decay envelope for `|g|^2 + |gamma|^2`:
/// `C_beta^2 exp(-lambda k^2 t^3 / 12) * initial`.
pub fn envelope_symmetric<T: Scalar>(
    t: T,
    mode: &ModeIndex<T>,
    rates: &RateConstants<T>,
    init_norm2: T,
) -> T {
    let k2 = T::of_i32(mode.k * mode.k);
    rates.c_beta * rates.c_beta * (-rates.lambda * k2 * t * t * t / T::of(12.0)).exp() * init_norm2
}

/// Sharper envelope using the full `int_0^t p` instead of its cubic lower
/// bound: `C_beta^2 exp(-(4 beta / (2 beta + 1)) lambda int p) * initial`.
/// Pointwise below [`envelope_symmetric`] whenever the gate holds.
pub fn envelope_symmetric_sharp<T: Scalar>(
    t: T,
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
    rates: &RateConstants<T>,
    init_norm2: T,
) -> T {
    let two = T::of(2.0);
    let four = T::of(4.0);
    let weight = four * params.beta / (two * params.beta + T::one());
    rates.c_beta * rates.c_beta * (-weight * rates.lambda * integral_p(t, mode)).exp() * init_norm2
}

/// Pointwise envelope for `|u1|` or `|u3|`:
/// `exp(-lambda k^2 t^3 / 24) [u_init + 6 C_beta (3 + beta) ((k^2+l^2)/k^6)^(1/4) sym_init_norm]`.
pub fn envelope_u1u3<T: Scalar>(
    t: T,
    mode: &ModeIndex<T>,
    params: &PhysParams<T>,
    rates: &RateConstants<T>,
    u_init: T,
    sym_init_norm: T,
) -> T {
    let k2 = T::of_i32(mode.k * mode.k);
    let kl2 = T::of_i32(mode.k * mode.k + mode.l * mode.l);
    let k6 = k2 * k2 * k2;
    let prefactor = T::of(6.0)
        * rates.c_beta
        * (T::of(3.0) + params.beta)
        * (kl2 / k6).powf(T::of(0.25));
    (-rates.lambda * k2 * t * t * t / T::of(24.0)).exp() * (u_init + prefactor * sym_init_norm)
}
