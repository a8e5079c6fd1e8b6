//! Fourier mode bookkeeping.
//!
//! A mode is indexed by integer wavenumbers `k` (streamwise) and `l`
//! (spanwise) and a continuous frequency `eta` in the wall-normal direction.
//! Modes with `k != 0` feel the shear; `k = 0` modes are streaks. The mean
//! mode `(0, 0, eta = 0)` carries no dynamics here and is excluded.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index of a single Fourier mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIndex<T> {
    pub k: i32,
    pub l: i32,
    pub eta: T,
}

impl<T: Scalar> ModeIndex<T> {
    /// Validated constructor; rejects the mean mode and non-finite `eta`.
    pub fn new(k: i32, l: i32, eta: T) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::validation("eta", "must be finite"));
        }
        if k == 0 && l == 0 && eta == T::zero() {
            return Err(Error::DegenerateMode {
                k,
                l,
                reason: "mean mode (0, 0, eta = 0) is excluded".to_string(),
            });
        }
        Ok(ModeIndex { k, l, eta })
    }

    /// Horizontal wavenumber magnitude `sqrt(k^2 + l^2)`.
    pub fn kl_norm(&self) -> T {
        let k = T::of_i32(self.k);
        let l = T::of_i32(self.l);
        (k * k + l * l).sqrt()
    }

    /// Squared magnitude of the full frequency vector `(k, eta, l)`.
    pub fn norm_sq(&self) -> T {
        let k = T::of_i32(self.k);
        let l = T::of_i32(self.l);
        k * k + self.eta * self.eta + l * l
    }

    /// Squared magnitude of the streak frequency vector `(eta, l)`.
    pub fn eta_l_norm_sq(&self) -> T {
        let l = T::of_i32(self.l);
        self.eta * self.eta + l * l
    }

    pub fn is_streak(&self) -> bool {
        self.k == 0
    }
}
