//! Embedded Dormand-Prince 5(4) integration with PI step-size control.
//!
//! The driver integrates complex state vectors of fixed size `N` and lands
//! exactly on caller-supplied sample times (steps are clamped, never
//! interpolated). A step primitive and the controller are exposed within the
//! crate so the integrating-factor variant can reuse them with a transformed
//! right-hand side.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Nodes of the Dormand-Prince tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

/// Stage coefficients; row `i` feeds stage `i+1`.
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-order weights (equal to the last `A` row: the scheme is FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// Error weights `b5 - b4`.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Tolerances and step limits for the adaptive driver.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    /// Hard floor; the controller proposing a smaller step is an error.
    pub step_floor: T,
}

impl<T: Scalar> Default for AdaptiveOptions<T> {
    fn default() -> Self {
        AdaptiveOptions {
            rel_tol: T::of(1e-9),
            abs_tol: T::of(1e-12),
            max_step: T::of(0.25),
            step_floor: T::of(1e-12),
        }
    }
}

/// One Dormand-Prince step from `(t, y)` with stage-1 slope `k1` supplied.
///
/// Returns the fifth-order solution, the embedded error vector, and the last
/// stage slope (valid as next step's `k1` when the step is accepted, since
/// the scheme is FSAL).
pub(crate) fn rk_step<T: Scalar, const N: usize>(
    f: &mut impl FnMut(T, &[Complex<T>; N]) -> [Complex<T>; N],
    t: T,
    h: T,
    y: &[Complex<T>; N],
    k1: &[Complex<T>; N],
) -> ([Complex<T>; N], [Complex<T>; N], [Complex<T>; N]) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut k: [[Complex<T>; N]; 7] = [[zero; N]; 7];
    k[0] = *k1;
    for stage in 1..7 {
        let mut arg = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = T::of(A[stage - 1][j]);
            if a != T::zero() {
                for i in 0..N {
                    arg[i] = arg[i] + kj[i] * (h * a);
                }
            }
        }
        k[stage] = f(t + T::of(C[stage]) * h, &arg);
    }
    let mut y5 = *y;
    let mut err = [zero; N];
    for (j, kj) in k.iter().enumerate() {
        let b = T::of(B5[j]);
        let e = T::of(E[j]);
        for i in 0..N {
            if b != T::zero() {
                y5[i] = y5[i] + kj[i] * (h * b);
            }
            err[i] = err[i] + kj[i] * (h * e);
        }
    }
    (y5, err, k[6])
}

/// Weighted RMS error over the real components.
pub(crate) fn error_norm<T: Scalar, const N: usize>(
    y: &[Complex<T>; N],
    y5: &[Complex<T>; N],
    err: &[Complex<T>; N],
    opts: &AdaptiveOptions<T>,
) -> T {
    let mut acc = T::zero();
    for i in 0..N {
        for (e, a, b) in [
            (err[i].re, y[i].re, y5[i].re),
            (err[i].im, y[i].im, y5[i].im),
        ] {
            let sc = opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());
            let r = e / sc;
            acc += r * r;
        }
    }
    (acc / T::of_usize(2 * N)).sqrt()
}

/// PI step controller in the classic Hairer tuning.
pub(crate) struct PiController<T> {
    facold: T,
    rejected: bool,
}

impl<T: Scalar> PiController<T> {
    const SAFETY: f64 = 0.9;
    const BETA: f64 = 0.04;
    const EXPO1: f64 = 0.2 - 0.04 * 0.75;
    /// Max shrink factor per accepted step.
    const FAC_MIN: f64 = 0.2;
    /// Max growth factor per accepted step.
    const FAC_MAX: f64 = 10.0;

    pub(crate) fn new() -> Self {
        PiController {
            facold: T::of(1e-4),
            rejected: false,
        }
    }

    /// Returns `(accept, next_h)` for a step of size `h` with error `err`.
    pub(crate) fn judge(&mut self, err: T, h: T) -> (bool, T) {
        let safe = T::of(Self::SAFETY);
        let fac11 = err.powf(T::of(Self::EXPO1));
        if err <= T::one() && err.is_finite() {
            let fac = fac11 / self.facold.powf(T::of(Self::BETA));
            let fac = (fac / safe)
                .max(T::of(1.0 / Self::FAC_MAX))
                .min(T::of(1.0 / Self::FAC_MIN));
            let mut h_new = h / fac;
            if self.rejected {
                // No growth straight after a rejection.
                h_new = h_new.min(h);
            }
            self.facold = err.max(T::of(1e-4));
            self.rejected = false;
            (true, h_new)
        } else {
            let shrink = if err.is_finite() {
                (fac11 / safe).min(T::of(1.0 / Self::FAC_MIN))
            } else {
                T::of(1.0 / Self::FAC_MIN)
            };
            self.rejected = true;
            (false, h / shrink.max(T::one()))
        }
    }
}

/// Integrates `y' = f(t, y)` from `t0`, returning the state at each entry of
/// `samples` (strictly increasing, all `> t0`). Steps land exactly on sample
/// times.
pub fn solve_sampled<T: Scalar, const N: usize>(
    mut f: impl FnMut(T, &[Complex<T>; N]) -> [Complex<T>; N],
    t0: T,
    y0: [Complex<T>; N],
    samples: &[T],
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<[Complex<T>; N]>> {
    validate_options(opts)?;
    let mut out = Vec::with_capacity(samples.len());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut ctrl = PiController::new();
    let mut h = initial_step(t0, samples, opts);
    for (i, &ts) in samples.iter().enumerate() {
        if ts <= t {
            return Err(Error::validation(
                "samples",
                format!("sample {} at t = {} is not increasing", i, ts),
            ));
        }
        while t < ts {
            let h_try = h.min(opts.max_step).min(ts - t);
            if h_try < opts.step_floor {
                return Err(Error::StepSizeUnderflow {
                    t: t.to_f64().unwrap_or(f64::NAN),
                    h: h_try.to_f64().unwrap_or(f64::NAN),
                });
            }
            let (y5, errv, k_last) = rk_step(&mut f, t, h_try, &y, &k1);
            let err = error_norm(&y, &y5, &errv, opts);
            let (accept, h_next) = ctrl.judge(err, h_try);
            if accept {
                t = t + h_try;
                y = y5;
                k1 = k_last;
            }
            h = h_next;
        }
        out.push(y);
    }
    Ok(out)
}

pub(crate) fn validate_options<T: Scalar>(opts: &AdaptiveOptions<T>) -> Result<()> {
    if !(opts.rel_tol > T::zero()) || !opts.rel_tol.is_finite() {
        return Err(Error::validation("rel_tol", "must be positive and finite"));
    }
    if !(opts.abs_tol > T::zero()) || !opts.abs_tol.is_finite() {
        return Err(Error::validation("abs_tol", "must be positive and finite"));
    }
    if !(opts.max_step > T::zero()) || !opts.max_step.is_finite() {
        return Err(Error::validation("max_step", "must be positive and finite"));
    }
    if !(opts.step_floor > T::zero()) {
        return Err(Error::validation("step_floor", "must be positive"));
    }
    Ok(())
}

fn initial_step<T: Scalar>(t0: T, samples: &[T], opts: &AdaptiveOptions<T>) -> T {
    let first_gap = samples
        .first()
        .map(|&s| s - t0)
        .unwrap_or_else(|| opts.max_step);
    // Conservative start; the controller grows it within a few steps.
    T::of(1e-3).min(opts.max_step).min(first_gap.abs().max(opts.step_floor))
}
