//! Symbol calculus for the sheared Laplacian.
//!
//! In the frame moving with the shear, the (negative) Laplacian acts on a
//! mode `(k, eta, l)` through the time-dependent symbol
//! `p(t) = k^2 + (eta - k t)^2 + l^2`. Everything downstream (symmetrized
//! variables, energy weights, dissipation integrals) is built from `p`, its
//! time derivatives, and its exact time integral.

use crate::mode::ModeIndex;
use crate::scalar::Scalar;

/// `p(t) = k^2 + (eta - k t)^2 + l^2`; always `>= k^2 + l^2 > 0` off the mean
/// mode.
pub fn symbol_p<T: Scalar>(t: T, mode: &ModeIndex<T>) -> T {
    let k = T::of_i32(mode.k);
    let l = T::of_i32(mode.l);
    let s = mode.eta - k * t;
    k * k + s * s + l * l
}

/// `p'(t) = -2 k (eta - k t)`.
pub fn symbol_p_prime<T: Scalar>(t: T, mode: &ModeIndex<T>) -> T {
    let k = T::of_i32(mode.k);
    -T::of(2.0) * k * (mode.eta - k * t)
}

/// `p''(t) = 2 k^2` (constant in time).
pub fn symbol_p_second<T: Scalar>(mode: &ModeIndex<T>) -> T {
    let k = T::of_i32(mode.k);
    T::of(2.0) * k * k
}

/// Stable fourth root `p^(1/4) = exp(ln(p)/4)`; `p > 0` on admitted modes.
pub fn fourth_root<T: Scalar>(p: T) -> T {
    debug_assert!(p > T::zero());
    (p.ln() * T::of(0.25)).exp()
}

/// The bounded weight ratio `p' / (|k,l| sqrt(p))`, which lives in `[-2, 2]`.
///
/// Requires `kl_norm > 0` (any mode with `k != 0` or `l != 0`).
pub fn symbol_ratio<T: Scalar>(t: T, mode: &ModeIndex<T>) -> T {
    let kl = mode.kl_norm();
    debug_assert!(kl > T::zero());
    symbol_p_prime(t, mode) / (kl * symbol_p(t, mode).sqrt())
}

/// Time derivative of [`symbol_ratio`]:
/// `(p'' - (p')^2 / (2p)) / (|k,l| sqrt(p))`.
///
/// Its total time integral over the line is finite (the ratio is a bounded
/// monotone function of `t`), which is what makes the energy argument close.
pub fn symbol_ratio_derivative<T: Scalar>(t: T, mode: &ModeIndex<T>) -> T {
    let kl = mode.kl_norm();
    debug_assert!(kl > T::zero());
    let p = symbol_p(t, mode);
    let pp = symbol_p_prime(t, mode);
    (symbol_p_second(mode) - pp * pp / (T::of(2.0) * p)) / (kl * p.sqrt())
}

/// Exact `int_0^t p(s) ds = (k^2 + l^2) t + t [ (eta - k t / 2)^2 + k^2 t^2 / 12 ]`.
///
/// Bounded below by `k^2 t^3 / 12` for `t >= 0`, which drives the enhanced
/// dissipation time scale.
pub fn integral_p<T: Scalar>(t: T, mode: &ModeIndex<T>) -> T {
    let k = T::of_i32(mode.k);
    let l = T::of_i32(mode.l);
    let half_kt = T::of(0.5) * k * t;
    let centered = mode.eta - half_kt;
    (k * k + l * l) * t + t * (centered * centered + k * k * t * t / T::of(12.0))
}
