//! Physical parameters and the enhanced-dissipation rate constants.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Viscosity `nu`, thermal diffusivity `kappa`, and the stratification
/// strength `beta` (square of the Brunt-Vaisala frequency scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams<T> {
    pub nu: T,
    pub kappa: T,
    pub beta: T,
}

impl<T: Scalar> PhysParams<T> {
    /// Validated constructor: `nu > 0`, `kappa > 0`, `beta >= 0`, all finite.
    pub fn new(nu: T, kappa: T, beta: T) -> Result<Self> {
        for (name, v) in [("nu", nu), ("kappa", kappa), ("beta", beta)] {
            if !v.is_finite() {
                return Err(Error::validation(name, "must be finite"));
            }
        }
        if nu <= T::zero() {
            return Err(Error::validation("nu", "must be positive"));
        }
        if kappa <= T::zero() {
            return Err(Error::validation("kappa", "must be positive"));
        }
        if beta < T::zero() {
            return Err(Error::validation("beta", "must be nonnegative"));
        }
        Ok(PhysParams { nu, kappa, beta })
    }

    pub fn min_diffusivity(&self) -> T {
        self.nu.min(self.kappa)
    }

    /// Whether the enhanced-dissipation rate constants exist for these
    /// parameters: `beta > 1/2` and `max(nu,kappa)/min(nu,kappa) < 4 beta - 1`,
    /// both strict (equality makes the rate vanish and the estimates empty).
    pub fn dissipation_gate(&self) -> bool {
        let half = T::of(0.5);
        if self.beta <= half {
            return false;
        }
        let ratio = self.nu.max(self.kappa) / self.nu.min(self.kappa);
        ratio < T::of(4.0) * self.beta - T::one()
    }
}

/// Decay rates of the symmetrized system and the coercivity constant.
///
/// `lambda_nu = nu - (nu + kappa)/(4 beta)`, `lambda_kappa` likewise with the
/// roles swapped, `lambda = min` of the two, and
/// `c_beta = [ (2 beta + 1)/(2 beta - 1) * exp(1/(2 beta - 1)) ]^(1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConstants<T> {
    pub lambda_nu: T,
    pub lambda_kappa: T,
    pub lambda: T,
    pub c_beta: T,
}

/// Computes the rate constants, failing with `ParameterGate` when the strict
/// gate does not hold (both rates must come out positive).
pub fn rate_constants<T: Scalar>(params: &PhysParams<T>) -> Result<RateConstants<T>> {
    if !params.dissipation_gate() {
        return Err(Error::ParameterGate {
            reason: format!(
                "need beta > 1/2 and max(nu,kappa)/min(nu,kappa) < 4 beta - 1 (strict); \
                 got nu = {}, kappa = {}, beta = {}",
                params.nu, params.kappa, params.beta
            ),
        });
    }
    let four_beta = T::of(4.0) * params.beta;
    let cross = (params.nu + params.kappa) / four_beta;
    let lambda_nu = params.nu - cross;
    let lambda_kappa = params.kappa - cross;
    let lambda = lambda_nu.min(lambda_kappa);
    debug_assert!(lambda > T::zero());
    let two_beta = T::of(2.0) * params.beta;
    let denom = two_beta - T::one();
    let c_beta = ((two_beta + T::one()) / denom * denom.recip().exp()).sqrt();
    Ok(RateConstants {
        lambda_nu,
        lambda_kappa,
        lambda,
        c_beta,
    })
}
