//! Riemann zeta by Euler–Maclaurin summation, and the completed zeta function.

use super::gamma::{is_gamma_pole, ln_gamma_mod, log_gamma};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

// Bernoulli numbers B_2, B_4, ..., B_30.
const BERN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

fn euler_maclaurin(s: C64) -> C64 {
    let n = (20.0f64).max(s.norm().ceil() + 10.0) as usize;
    let nf = n as f64;
    let mut acc = crate::util::sum::KahanC::new();
    for j in 1..n {
        acc.add((-s * (j as f64).ln()).exp());
    }
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp(); // N^{-s}
    acc.add(n_pow * nf / (s - 1.0));
    acc.add(n_pow * 0.5);
    // Σ B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut rising = s; // s(s+1)…(s+2k−2), starts at k=1: s
    let mut fact = 2.0; // (2k)!
    let mut npow = n_pow / nf; // N^{-s-1}
    for k in 1..=BERN.len() {
        let term = rising * npow * (BERN[k - 1] / fact);
        acc.add(term);
        if term.norm() < 1e-18 * acc.value().norm() {
            break;
        }
        // advance to k+1
        let kk = k as f64;
        rising = rising * (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        fact *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
        npow /= nf * nf;
    }
    acc.value()
}

/// Riemann ζ(s) for s ≠ 1.
///
/// Euler–Maclaurin for Re s ≥ 0; the functional equation for Re s < 0.
pub fn zeta(s: C64) -> Result<C64> {
    if s == C64::new(1.0, 0.0) {
        return Err(Error::domain("zeta: pole at s = 1"));
    }
    if s.re < 0.0 {
        // ζ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s) ζ(1−s)
        let one_minus = C64::new(1.0, 0.0) - s;
        let z1 = euler_maclaurin(one_minus);
        let pre = (s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_gamma_mod(one_minus)).exp() * (s * (PI / 2.0)).sin();
        return Ok(pre * z1);
    }
    Ok(euler_maclaurin(s))
}

/// Completed zeta ζ*(s) = π^{−s/2} Γ(s/2) ζ(s); poles at s = 0 and s = 1.
pub fn completed_zeta(s: C64) -> Result<C64> {
    if s == C64::new(0.0, 0.0) || s == C64::new(1.0, 0.0) {
        return Err(Error::domain(format!("completed_zeta: pole at s = {s}")));
    }
    let half = s * 0.5;
    if is_gamma_pole(half) {
        // trivial zeros of ζ cancel the poles of Γ(s/2): use the functional equation.
        return completed_zeta(C64::new(1.0, 0.0) - s);
    }
    let pre = (-half * PI.ln() + log_gamma(half)?).exp();
    Ok(pre * zeta(s)?)
}
