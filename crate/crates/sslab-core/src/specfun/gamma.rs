//! Complex log-gamma by Stirling's series with upward recurrence.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k(2k-1)), k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Stirling series, valid (to ~1e-17) for |w| ≥ 15 and Re w ≥ 0.
#[inline]
fn stirling(w: C64) -> C64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = C64::new(STIRLING[7], 0.0);
    for c in STIRLING[..7].iter().rev() {
        series = series * inv2 + c;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series * inv
}

#[inline]
fn shift_count(z: C64) -> usize {
    if z.re >= 15.0 || (z.re >= 0.0 && z.norm_sqr() >= 225.0) {
        0
    } else {
        (15.0 - z.re).ceil() as usize
    }
}

/// True when `z` is (numerically exactly) a pole of Γ.
#[inline]
pub fn is_gamma_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal branch of log Γ(z): analytic in ℂ ∖ (−∞, 0] and real for z > 0.
///
/// Errors with a domain error at the poles z ∈ ℤ_{≤0}.
pub fn log_gamma(z: C64) -> Result<C64> {
    if is_gamma_pole(z) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain(format!("log_gamma: pole or non-finite input {z}")));
    }
    let n = shift_count(z);
    let mut corr = C64::new(0.0, 0.0);
    for j in 0..n {
        corr += (z + j as f64).ln();
    }
    Ok(stirling(z + n as f64) - corr)
}

/// log Γ(z) modulo 2πi — cheaper (one logarithm for the recurrence product).
/// Only `exp` of the result is meaningful. Returns -∞ real part never; at poles the
/// real part is +∞.
#[inline]
pub fn ln_gamma_mod(z: C64) -> C64 {
    let n = shift_count(z);
    if n == 0 {
        return stirling(z);
    }
    // Product of (z + j) in chunks to avoid overflow.
    let mut corr = C64::new(0.0, 0.0);
    let mut prod = C64::new(1.0, 0.0);
    for j in 0..n {
        prod *= z + j as f64;
        if j % 12 == 11 {
            corr += prod.ln();
            prod = C64::new(1.0, 0.0);
        }
    }
    corr += prod.ln();
    stirling(z + n as f64) - corr
}

/// Γ(z). Errors at poles.
pub fn gamma(z: C64) -> Result<C64> {
    Ok(log_gamma(z)?.exp())
}

/// 1/Γ(z), entire; exactly zero at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if is_gamma_pole(z) {
        return C64::new(0.0, 0.0);
    }
    (-ln_gamma_mod(z)).exp()
}

/// Γ(x) for real x (not a pole).
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma(C64::new(x, 0.0))?.re)
}

/// log|Γ(x)| for real x.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    Ok(log_gamma(C64::new(x, 0.0))?.re)
}

/// Reflection residual helper: Γ(z)Γ(1−z) − π/sin(πz) (used in tests and diagnostics).
pub fn reflection_residual(z: C64) -> Result<f64> {
    let lhs = (log_gamma(z)? + log_gamma(C64::new(1.0, 0.0) - z)?).exp();
    let rhs = C64::new(PI, 0.0) / (z * PI).sin();
    Ok((lhs - rhs).norm() / rhs.norm())
}
