//! Stable evaluation of cosh(ct) and sinh(ct)/c parameterized by c².
//!
//! The streak solution kernels take c = √(a² − b²), which is real, zero, or
//! imaginary depending on the parameters. Branching on the sign of c² keeps
//! everything in real arithmetic; a short series covers the neighborhood of
//! c² = 0 so both branches meet continuously.

use crate::scalar::Scalar;

/// |c²|·t² below this evaluates via series; truncation error is below f64
/// round-off there.
fn series_threshold<T: Scalar>() -> T {
    T::of(1e-4)
}

/// sinh(ct)/c continued through c² ≤ 0: sin(st)/s for c² = −s², t at c² = 0.
pub fn sinhc_stable<T: Scalar>(c_squared: T, t: T) -> T {
    let x = c_squared * t * t;
    if x.abs() < series_threshold() {
        return t
            * (T::one()
                + x / T::of(6.0)
                + x * x / T::of(120.0)
                + x * x * x / T::of(5040.0));
    }
    if c_squared > T::zero() {
        let c = c_squared.sqrt();
        (c * t).sinh() / c
    } else {
        let s = (-c_squared).sqrt();
        (s * t).sin() / s
    }
}

/// cosh(ct) continued through c² ≤ 0: cos(st) for c² = −s².
pub fn coshc_stable<T: Scalar>(c_squared: T, t: T) -> T {
    let x = c_squared * t * t;
    if x.abs() < series_threshold() {
        return T::one()
            + x / T::of(2.0)
            + x * x / T::of(24.0)
            + x * x * x / T::of(720.0);
    }
    if c_squared > T::zero() {
        (c_squared.sqrt() * t).cosh()
    } else {
        ((-c_squared).sqrt() * t).cos()
    }
}

/// e^{mt}·cosh(ct) without forming cosh(ct) alone; safe when m ± √c² ≤ 0
/// even where cosh(ct) itself would overflow.
pub fn exp_coshc<T: Scalar>(m: T, c_squared: T, t: T) -> T {
    let x = c_squared * t * t;
    if x.abs() < series_threshold() {
        return (m * t).exp() * coshc_stable(c_squared, t);
    }
    if c_squared > T::zero() {
        let c = c_squared.sqrt();
        let half = T::of(0.5);
        half * (((m + c) * t).exp() + ((m - c) * t).exp())
    } else {
        (m * t).exp() * ((-c_squared).sqrt() * t).cos()
    }
}

/// e^{mt}·sinh(ct)/c with the same overflow safety as `exp_coshc`.
pub fn exp_sinhc<T: Scalar>(m: T, c_squared: T, t: T) -> T {
    let x = c_squared * t * t;
    if x.abs() < series_threshold() {
        return (m * t).exp() * sinhc_stable(c_squared, t);
    }
    if c_squared > T::zero() {
        let c = c_squared.sqrt();
        let half = T::of(0.5);
        half * (((m + c) * t).exp() - ((m - c) * t).exp()) / c
    } else {
        let s = (-c_squared).sqrt();
        (m * t).exp() * (s * t).sin() / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn matches_plain_hyperbolic_and_trig_branches() {
        assert_relative_eq!(sinhc_stable(4.0, 1.0), 2.0_f64.sinh() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(coshc_stable(4.0, 1.0), 2.0_f64.cosh(), max_relative = 1e-15);
        assert_relative_eq!(sinhc_stable(-4.0, 1.0), 2.0_f64.sin() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(coshc_stable(-4.0, 1.0), 2.0_f64.cos(), max_relative = 1e-15);
        assert_relative_eq!(sinhc_stable(-1.0, std::f64::consts::PI), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_c_is_the_linear_limit() {
        assert_eq!(sinhc_stable(0.0, 2.0), 2.0);
        assert_eq!(coshc_stable(0.0, 7.5), 1.0);
        assert_eq!(coshc_stable(-3.0, 0.0), 1.0);
        assert_eq!(sinhc_stable(5.0, 0.0), 0.0);
    }

    #[test]
    fn continuous_across_the_branch_point() {
        // Perturbing c = +/- 1e-9 across the degenerate point (c_squared
        // = +/- 1e-18) moves the kernels by far less than 1e-10...
        let eps_sq = 1e-18;
        for i in 0..=50 {
            let t = 0.2 * i as f64;
            assert!(
                (sinhc_stable(eps_sq, t) - sinhc_stable(-eps_sq, t)).abs() <= 1e-10,
                "sinhc jump at t = {}",
                t
            );
            assert!(
                (coshc_stable(eps_sq, t) - coshc_stable(-eps_sq, t)).abs() <= 1e-10,
                "coshc jump at t = {}",
                t
            );
        }
        // ...and the modulus of continuity in c_squared is linear: the gap
        // is bounded by its leading series term with 10% headroom.
        let c2 = 1e-5;
        for i in 1..=50 {
            let t = 0.2 * i as f64;
            let sinhc_gap = (sinhc_stable(c2, t) - sinhc_stable(-c2, t)).abs();
            let coshc_gap = (coshc_stable(c2, t) - coshc_stable(-c2, t)).abs();
            assert!(sinhc_gap <= 1.1 * c2 * t * t * t / 3.0, "sinhc modulus at t = {}", t);
            assert!(coshc_gap <= 1.1 * c2 * t * t, "coshc modulus at t = {}", t);
        }
    }

    #[test]
    fn series_matches_direct_at_crossover() {
        // Just above and below the series window the two evaluations agree.
        for &c2 in &[1e-4_f64, -1e-4] {
            let t_lo = 0.99; // |x| just under 1e-4
            let t_hi = 1.01; // just over
            let direct = |c2: f64, t: f64| {
                if c2 > 0.0 {
                    ((c2.sqrt() * t).sinh() / c2.sqrt(), (c2.sqrt() * t).cosh())
                } else {
                    (((-c2).sqrt() * t).sin() / (-c2).sqrt(), ((-c2).sqrt() * t).cos())
                }
            };
            for &t in &[t_lo, t_hi] {
                let (s_ref, c_ref) = direct(c2, t);
                assert_relative_eq!(sinhc_stable(c2, t), s_ref, max_relative = 1e-13);
                assert_relative_eq!(coshc_stable(c2, t), c_ref, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn coshc_derivative_is_c2_times_sinhc() {
        let h = 1e-6;
        for &c2 in &[3.0_f64, -3.0, 1e-7, -1e-7] {
            for &t in &[0.3, 1.7, 4.0] {
                let fd = (coshc_stable(c2, t + h) - coshc_stable(c2, t - h)) / (2.0 * h);
                let exact = c2 * sinhc_stable(c2, t);
                assert_relative_eq!(fd, exact, max_relative = 1e-8, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn scaled_forms_survive_arguments_that_overflow_unscaled() {
        // cosh(ct) alone overflows (ct = 1e6) but e^{mt}cosh(ct) is ~1/2.
        let m = -10.0_f64;
        let c2 = 100.0_f64 - 1e-6;
        let t = 1e5_f64;
        let ec = exp_coshc(m, c2, t);
        let es = exp_sinhc(m, c2, t);
        assert!(ec.is_finite() && ec > 0.0 && ec <= 1.0, "exp_coshc = {}", ec);
        assert!(es.is_finite() && es > 0.0, "exp_sinhc = {}", es);
        // Against the analytic value 0.5(e^{(m+c)t} + e^{(m-c)t}).
        let c = c2.sqrt();
        assert_relative_eq!(ec, 0.5 * ((m + c) * t).exp(), max_relative = 1e-12);
    }

    #[test]
    fn scaled_forms_match_products_in_safe_range() {
        for &c2 in &[2.5_f64, -2.5, 1e-9] {
            for &t in &[0.1, 1.0, 3.0] {
                let m = -1.3;
                assert_relative_eq!(
                    exp_coshc(m, c2, t),
                    (m * t).exp() * coshc_stable(c2, t),
                    max_relative = 1e-12
                );
                assert_relative_eq!(
                    exp_sinhc(m, c2, t),
                    (m * t).exp() * sinhc_stable(c2, t),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn equal_diffusivities_reduce_to_sine_and_cosine() {
        let b: f64 = 0.8;
        let t = 2.3;
        assert_relative_eq!(coshc_stable(-b * b, t), (b * t).cos(), max_relative = 1e-14);
        assert_relative_eq!(
            b * sinhc_stable(-b * b, t),
            (b * t).sin(),
            max_relative = 1e-14
        );
    }
}
