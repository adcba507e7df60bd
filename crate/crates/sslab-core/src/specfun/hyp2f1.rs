//! Gauss hypergeometric function ₂F₁(a, b; c; x) for real x < 1.
//!
//! Evaluation paths:
//! * |x| ≤ ½: the defining power series;
//! * −2 ≤ x < −½: the Pfaff transformation (argument x/(x−1) ∈ [⅓, ⅔]);
//! * x < −2: the 1/x connection formula. When a − b is within 1e-3 of an integer,
//!   this falls back to the Mellin–Barnes integral of Eq. 2.2.29;
//! * the Mellin–Barnes integral itself ([`gauss_2f1_mb`]) is exposed as an
//!   independent oracle.

use super::gamma::{is_gamma_pole, ln_gamma_mod, rgamma};
use super::mb::{ContourOptions, GammaFactor, MbIntegral, Placement};
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use num_complex::Complex64 as C64;

const DEGENERACY_TOL: f64 = 1e-3;

fn near_nonpositive_integer(z: C64, tol: f64) -> bool {
    z.im.abs() < tol && z.re < tol && (z.re - z.re.round()).abs() < tol
}

fn is_nonpositive_integer(z: C64) -> bool {
    is_gamma_pole(z)
}

/// Power series Σ (a)_n(b)_n/(c)_n xⁿ/n!.
fn series(a: C64, b: C64, c: C64, x: f64, cfg: &PrecisionConfig) -> Result<C64> {
    let mut term = C64::new(1.0, 0.0);
    let mut acc = crate::util::sum::KahanC::new();
    acc.add(term);
    let mut small = 0;
    for n in 0..cfg.series_max_terms.max(4096) {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        acc.add(term);
        if term == C64::new(0.0, 0.0) {
            return Ok(acc.value());
        }
        if term.norm() <= 1e-17 * acc.value().norm() {
            small += 1;
            if small >= 3 {
                return Ok(acc.value());
            }
        } else {
            small = 0;
        }
    }
    Err(Error::accuracy("gauss_2f1: series did not converge", term.norm() / acc.value().norm()))
}

/// ₂F₁(a, b; c; x) for real x < 1 (x ∈ (½, 1) only by slow series, a non-goal).
pub fn gauss_2f1(a: C64, b: C64, c: C64, x: f64, cfg: &PrecisionConfig) -> Result<C64> {
    if is_nonpositive_integer(c) {
        return Err(Error::domain(format!("gauss_2f1: c = {c} is a non-positive integer")));
    }
    if !(x < 1.0) || !x.is_finite() {
        return Err(Error::domain(format!("gauss_2f1: x = {x} must be < 1")));
    }
    if x == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    // Terminating series are exact polynomials.
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) || x.abs() <= 0.5 || x > 0.0 {
        return series(a, b, c, x, cfg);
    }
    if x >= -2.0 {
        // Pfaff: F(a,b;c;x) = (1−x)^{−a} F(a, c−b; c; x/(x−1))
        let w = x / (x - 1.0);
        let f = series(a, c - b, c, w, cfg)?;
        return Ok((-a * (1.0 - x).ln()).exp() * f);
    }
    let d = a - b;
    if d.im.abs() < DEGENERACY_TOL && (d.re - d.re.round()).abs() < DEGENERACY_TOL {
        return gauss_2f1_mb(a, b, c, x, cfg);
    }
    connection_1_over_x(a, b, c, x, cfg)
}

fn gamma_ratio(num: &[C64], den: &[C64]) -> C64 {
    // ∏Γ(num)/∏Γ(den), zero if a denominator argument is a pole
    if den.iter().any(|&z| is_gamma_pole(z)) {
        return C64::new(0.0, 0.0);
    }
    let mut l = C64::new(0.0, 0.0);
    for &z in num {
        l += ln_gamma_mod(z);
    }
    for &z in den {
        l -= ln_gamma_mod(z);
    }
    l.exp()
}

fn connection_1_over_x(a: C64, b: C64, c: C64, x: f64, cfg: &PrecisionConfig) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    let lnmx = (-x).ln();
    let w = 1.0 / x;
    let t1 = gamma_ratio(&[c, b - a], &[b, c - a]) * (-a * lnmx).exp() * series(a, a - c + one, a - b + one, w, cfg)?;
    let t2 = gamma_ratio(&[c, a - b], &[a, c - b]) * (-b * lnmx).exp() * series(b, b - c + one, b - a + one, w, cfg)?;
    Ok(t1 + t2)
}

/// 1/(Γ(a)Γ(b)) · (1/2πi)∫ Γ(a+t)Γ(b+t)Γ(−t)/Γ(c+t) (−x)^t dt  =  ₂F₁(a,b;c;x)/Γ(c). Requires x < 0.
fn mb_regularized(a: C64, b: C64, c: C64, x: f64, cfg: &PrecisionConfig) -> Result<C64> {
    if !(x < 0.0) {
        return Err(Error::domain("gauss_2f1 Mellin–Barnes path requires x < 0"));
    }
    let pre = rgamma(a) * rgamma(b);
    let mb = MbIntegral::new(
        vec![GammaFactor::plus(a), GammaFactor::plus(b), GammaFactor::minus(C64::new(0.0, 0.0))],
        vec![GammaFactor::plus(c)],
        C64::new((-x).ln(), 0.0),
    );
    let out = mb.evaluate(&ContourOptions { placement: Placement::Saddle, ..Default::default() }, cfg)?;
    Ok(pre * out.value)
}

/// ₂F₁ by direct Mellin–Barnes quadrature of Eq. 2.2.29 (x < 0).
pub fn gauss_2f1_mb(a: C64, b: C64, c: C64, x: f64, cfg: &PrecisionConfig) -> Result<C64> {
    if is_nonpositive_integer(c) {
        return Err(Error::domain(format!("gauss_2f1: c = {c} is a non-positive integer")));
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return series(a, b, c, x, cfg);
    }
    let g = (ln_gamma_mod(c)).exp();
    Ok(g * mb_regularized(a, b, c, x, cfg)?)
}

/// Regularized ₂F₁(a,b;c;x)/Γ(c), entire in c. Near the poles of Γ(c) (within 1e-3)
/// it is evaluated as a single Mellin–Barnes expression.
pub fn gauss_2f1_regularized(a: C64, b: C64, c: C64, x: f64, cfg: &PrecisionConfig) -> Result<C64> {
    if near_nonpositive_integer(c, DEGENERACY_TOL) {
        if is_nonpositive_integer(a) || is_nonpositive_integer(b) || x >= 0.0 {
            return Err(Error::domain("gauss_2f1_regularized: limit case c ∈ ℤ≤0 only supported for x < 0 and non-polynomial F"));
        }
        return mb_regularized(a, b, c, x, cfg);
    }
    Ok(gauss_2f1(a, b, c, x, cfg)? * rgamma(c))
}
