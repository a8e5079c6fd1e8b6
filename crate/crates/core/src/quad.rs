//! Quadrature utilities: Gauss-Legendre rules for profile sampling and an
//! adaptive Simpson integrator used to cross-check closed-form integrals.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// exact for polynomials of degree 2n - 1. Newton iteration from the
/// Chebyshev-like initial guess cos(pi (i - 1/4) / (n + 1/2)).
pub fn gauss_legendre<T: Scalar>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n == 0 {
        return Err(Error::validation("n", "rule needs at least one node"));
    }
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::of_usize(n);
    let half = (n + 1) / 2;
    for i in 0..half {
        let idx = T::of_usize(i + 1);
        let mut x = (T::PI() * (idx - T::of(0.25)) / (nf + T::of(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            // Legendre recurrence: (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}.
            let mut p0 = T::one();
            let mut p1 = x;
            for j in 1..n {
                let jf = T::of_usize(j);
                let p2 = ((T::of(2.0) * jf + T::one()) * x * p1 - jf * p0) / (jf + T::one());
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - T::one());
            let dx = p1 / dp;
            x = x - dx;
            if dx.abs() <= T::of(1e-15) * x.abs().max(T::one()) {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Ok((nodes, weights))
}

/// Adaptive Simpson integration of `f` over [a, b] to absolute tolerance
/// `tol`, with the usual one-fifteenth Richardson error estimate per
/// bisection. Fails if some subinterval still disagrees at `max_depth`.
pub fn adaptive_simpson<T: Scalar>(
    f: &mut impl FnMut(T) -> T,
    a: T,
    b: T,
    tol: T,
    max_depth: usize,
) -> Result<T> {
    if !(tol > T::zero()) {
        return Err(Error::validation("tol", "must be positive"));
    }
    let m = (a + b) / T::of(2.0);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::of(6.0) * (fa + T::of(4.0) * fm + fb)
}

fn simpson_rec<T: Scalar>(
    f: &mut impl FnMut(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: usize,
) -> Result<T> {
    let m = (a + b) / T::of(2.0);
    let lm = (a + m) / T::of(2.0);
    let rm = (m + b) / T::of(2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= T::of(15.0) * tol {
        return Ok(left + right + delta / T::of(15.0));
    }
    if depth == 0 {
        return Err(Error::Quadrature {
            reason: format!(
                "interval [{}, {}] did not converge: residual {}",
                a, b, delta
            ),
        });
    }
    let half_tol = tol / T::of(2.0);
    let l = simpson_rec(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?;
    let r = simpson_rec(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?;
    Ok(l + r)
}

/// The whole-line integral of p(t)^(-3/4) for a sheared mode,
/// `int_R (k^2 + (eta - kt)^2 + l^2)^(-3/4) dt`, independent of eta and
/// bounded by 6 |k|^(-3/2). Computed through the substitution
/// `eta - kt = m sinh(w)`, `m^2 = k^2 + l^2`, which compactifies the slow
/// algebraic tail into `cosh(w)^(-1/2)` truncated at |w| = 60.
pub fn integral_p_neg34<T: Scalar>(k: i32, l: i32) -> Result<T> {
    if k == 0 {
        return Err(Error::DegenerateMode {
            k,
            l,
            reason: "decay-time integral needs a sheared mode (k != 0)".to_string(),
        });
    }
    let m2 = T::of_i32(k * k + l * l);
    let prefactor = T::one() / (m2.sqrt().sqrt() * T::of_i32(k.abs()));
    let mut integrand = |w: T| prefactor / w.cosh().sqrt();
    let cut = T::of(60.0);
    adaptive_simpson(&mut integrand, -cut, cut, T::of(1e-13), 48)
}
