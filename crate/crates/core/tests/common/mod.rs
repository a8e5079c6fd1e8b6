//! Independent oracles for the integration suites: a dense matrix
//! exponential and a direct adaptive integration of the streak system.
//! Nothing here reuses the closed-form kernels under test.

use num_complex::Complex;
use strat_lab_core::{solve_sampled, streak_rhs, AdaptiveOptions, PhysParams, StreakState};

pub fn mat_mul<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut out = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..N {
            let mut acc = 0.0;
            for (k, bk) in b.iter().enumerate() {
                acc += a[i][k] * bk[j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn identity<const N: usize>() -> [[f64; N]; N] {
    let mut out = [[0.0; N]; N];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    out
}

pub fn norm_inf<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential `exp(a t)` by scaling and squaring with a Taylor
/// series on the scaled matrix (series norm < 1/4, 30 terms).
pub fn expm<const N: usize>(a: &[[f64; N]; N], t: f64) -> [[f64; N]; N] {
    let mut scaled = *a;
    for row in scaled.iter_mut() {
        for x in row.iter_mut() {
            *x *= t;
        }
    }
    let norm = norm_inf(&scaled);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let factor = 0.5f64.powi(squarings as i32);
    for row in scaled.iter_mut() {
        for x in row.iter_mut() {
            *x *= factor;
        }
    }
    let mut result = identity::<N>();
    let mut term = identity::<N>();
    for k in 1..=30 {
        term = mat_mul(&term, &scaled);
        let inv_k = 1.0 / k as f64;
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x *= inv_k;
            }
        }
        for i in 0..N {
            for j in 0..N {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

/// Adaptive Runge-Kutta reference solution of the raw streak system at the
/// given strictly increasing positive sample times.
pub fn oracle_integrate_streak(
    init: &StreakState<f64>,
    params: &PhysParams<f64>,
    eta: f64,
    l: i32,
    samples: &[f64],
    opts: &AdaptiveOptions<f64>,
) -> Vec<StreakState<f64>> {
    let y0 = [init.u1, init.u2, init.u3, init.theta];
    let f = |_t: f64, y: &[Complex<f64>; 4]| {
        let s = StreakState {
            u1: y[0],
            u2: y[1],
            u3: y[2],
            theta: y[3],
        };
        let d = streak_rhs(&s, params, eta, l);
        [d.u1, d.u2, d.u3, d.theta]
    };
    solve_sampled(f, 0.0, y0, samples, opts)
        .expect("oracle integration failed")
        .into_iter()
        .map(|y| StreakState {
            u1: y[0],
            u2: y[1],
            u3: y[2],
            theta: y[3],
        })
        .collect()
}

pub fn state_diff(a: &StreakState<f64>, b: &StreakState<f64>) -> f64 {
    ((a.u1 - b.u1).norm_sqr()
        + (a.u2 - b.u2).norm_sqr()
        + (a.u3 - b.u3).norm_sqr()
        + (a.theta - b.theta).norm_sqr())
    .sqrt()
}
