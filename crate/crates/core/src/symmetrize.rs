//! Symmetrization of the per-mode unknowns.
//!
//! For a sheared mode (`k != 0`) the raw unknowns are `q` (Laplacian of the
//! wall-normal velocity), the buoyancy `theta`, and the two recovered
//! velocity components `u1`, `u3`. The weighted variables
//!
//! ```text
//! g     = q / (|k,l|^(1/2) p^(1/4))
//! gamma = |k,l|^(1/2) p^(1/4) theta
//! ```
//!
//! make the buoyancy coupling antisymmetric, which is what the energy
//! functional exploits. The weights are time dependent through `p`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::mode::ModeIndex;
use crate::scalar::Scalar;
use crate::symbol::{fourth_root, symbol_p};

/// Raw unknowns of one sheared mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonzeroModeState<T> {
    pub q: Complex<T>,
    pub theta: Complex<T>,
    pub u1: Complex<T>,
    pub u3: Complex<T>,
}

impl<T: Scalar> NonzeroModeState<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        NonzeroModeState {
            q: z,
            theta: z,
            u1: z,
            u3: z,
        }
    }

    /// Largest component magnitude; the scale used by residual thresholds.
    pub fn amplitude(&self) -> T {
        self.q
            .norm()
            .max(self.theta.norm())
            .max(self.u1.norm())
            .max(self.u3.norm())
    }
}

/// Symmetrized pair `(g, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricState<T> {
    pub g: Complex<T>,
    pub gamma: Complex<T>,
}

impl<T: Scalar> SymmetricState<T> {
    /// `|g|^2 + |gamma|^2`, the quantity the decay envelopes bound.
    pub fn norm_sq(&self) -> T {
        self.g.norm_sqr() + self.gamma.norm_sqr()
    }

    /// `sqrt(|g|^2 + |gamma|^2)` evaluated without forming the squares,
    /// which underflow for tail amplitudes whose norm is representable.
    pub fn norm(&self) -> T {
        self.g.norm().hypot(self.gamma.norm())
    }
}

fn require_sheared<T: Scalar>(mode: &ModeIndex<T>) -> Result<()> {
    if mode.k == 0 {
        return Err(Error::DegenerateMode {
            k: mode.k,
            l: mode.l,
            reason: "symmetrization is defined for sheared modes (k != 0)".to_string(),
        });
    }
    Ok(())
}

/// Weight `w(t) = |k,l|^(1/2) p(t)^(1/4)`; `g = q / w`, `gamma = w theta`.
fn weight<T: Scalar>(t: T, mode: &ModeIndex<T>) -> T {
    mode.kl_norm().sqrt() * fourth_root(symbol_p(t, mode))
}

/// Maps `(q, theta)` to the symmetrized pair at time `t`.
pub fn to_symmetric<T: Scalar>(
    t: T,
    mode: &ModeIndex<T>,
    state: &NonzeroModeState<T>,
) -> Result<SymmetricState<T>> {
    require_sheared(mode)?;
    let w = weight(t, mode);
    Ok(SymmetricState {
        g: state.q / w,
        gamma: state.theta * w,
    })
}

/// Inverse of [`to_symmetric`]: recovers `(q, theta)` at time `t`.
pub fn from_symmetric<T: Scalar>(
    t: T,
    mode: &ModeIndex<T>,
    sym: &SymmetricState<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    require_sheared(mode)?;
    let w = weight(t, mode);
    Ok((sym.g * w, sym.gamma / w))
}

/// Wall-normal velocity from `q`: the sheared Laplacian has symbol `-p`,
/// so `u2 = -q / p`.
pub fn u2_from_q<T: Scalar>(t: T, mode: &ModeIndex<T>, q: Complex<T>) -> Complex<T> {
    -q / symbol_p(t, mode)
}

/// Divergence residual `|k u1 + (eta - k t) u2 + l u3|` with `u2 = -q/p`.
/// Exactly conserved modulo dissipation by the mode evolution, so it doubles
/// as an integration diagnostic.
pub fn divergence_residual<T: Scalar>(t: T, mode: &ModeIndex<T>, state: &NonzeroModeState<T>) -> T {
    let k = T::of_i32(mode.k);
    let l = T::of_i32(mode.l);
    let u2 = u2_from_q(t, mode, state.q);
    let div = state.u1 * k + u2 * (mode.eta - k * t) + state.u3 * l;
    div.norm()
}
