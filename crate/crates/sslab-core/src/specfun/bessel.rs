//! Modified Bessel function K_μ(y) of complex order.
//!
//! K_μ(y) = ½∫_{−∞}^{∞} exp(−y cosh t + μt) dt. For Im μ = b ≠ 0 the integrand
//! oscillates and the naive real-line integral cancels like e^{π|b|/2}. The line
//! is therefore shifted to Im t = c, with c placed at the imaginary saddle
//! asin(b/y) (or just below π/2 when |b| ≥ y). That shift is legal for |c| < π/2
//! because the integrand decays in the strip.

use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::util::quad::trapezoid_doubling;
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_PI_2;

fn shift_for(mu: C64, y: f64) -> f64 {
    let b = mu.im;
    if b == 0.0 {
        return 0.0;
    }
    let ab = b.abs();
    let eta = (2.0 / ab).min(0.5);
    let c = if ab < y { (ab / y).asin().min(FRAC_PI_2 - eta) } else { FRAC_PI_2 - eta };
    c.max(0.0) * b.signum()
}

/// e^{y}·K_μ(y), avoiding underflow for large y.
pub fn bessel_k_scaled(mu: C64, y: f64, cfg: &PrecisionConfig) -> Result<C64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain(format!("bessel_k: y = {y} must be positive")));
    }
    let c = shift_for(mu, y);
    let (sc, cc) = c.sin_cos();
    // Re of exponent along the shifted line: −y(cos c cosh u − 1) + Re μ u − Im μ c
    let g = |u: f64| -y * (cc * u.cosh() - 1.0) + mu.re * u - mu.im * c;
    // locate the effective support on a coarse grid
    let step = 0.125;
    let mut peak = f64::NEG_INFINITY;
    let grid: Vec<f64> = (-480..=480).map(|j| j as f64 * step).collect();
    for &u in &grid {
        peak = peak.max(g(u));
    }
    let thresh = peak - 45.0;
    let lo = grid.iter().position(|&u| g(u) > thresh).unwrap_or(0);
    let hi = grid.iter().rposition(|&u| g(u) > thresh).unwrap_or(grid.len() - 1);
    let a = grid[lo.saturating_sub(1)];
    let b = grid[(hi + 1).min(grid.len() - 1)];
    if g(a) > thresh + 5.0 || g(b) > thresh + 5.0 {
        return Err(Error::accuracy("bessel_k: integrand support exceeds truncation window", (g(a).max(g(b)) - peak).exp()));
    }
    let f = |u: f64| {
        // exponent: −y(cosh(u+ic) − 1) + μ(u + ic)
        let ch = C64::new(u.cosh() * cc, u.sinh() * sc);
        let e = -(ch - 1.0) * y + mu * C64::new(u, c);
        e.exp()
    };
    let n0 = ((b - a) * cfg.quad_points as f64).ceil() as usize;
    let tol = cfg.rel_tol.max(1e-15);
    // Rounding floor of the sum is ≈ ε·peak·(b − a); near zeros of K_{it} the value
    // itself sits below it, so only absolute accuracy at that floor is attainable.
    let floor = peak.exp() * (b - a) * 4e-16;
    let val = trapezoid_doubling(f, a, b, n0, tol, floor, 14)? * 0.5;
    // K is real for real order and for purely imaginary order.
    if mu.im == 0.0 || mu.re == 0.0 {
        return Ok(C64::new(val.re, 0.0));
    }
    Ok(val)
}

/// K_μ(y) for complex order μ and y > 0.
pub fn bessel_k(mu: C64, y: f64, cfg: &PrecisionConfig) -> Result<C64> {
    Ok(bessel_k_scaled(mu, y, cfg)? * (-y).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn half_order_closed_form() {
        let v = bessel_k(C64::new(0.5, 0.0), 1.0, &cfg()).unwrap();
        let exact = (PI / 2.0).sqrt() * (-1.0f64).exp();
        assert!((v.re - exact).abs() < 1e-15);
        assert!((exact - 0.461_068_6).abs() < 1e-7);
    }

    #[test]
    fn order_zero() {
        let v = bessel_k(C64::new(0.0, 0.0), 1.0, &cfg()).unwrap();
        assert!((v.re - 0.421_024_438_240_708_3).abs() < 1e-15);
    }

    #[test]
    fn imaginary_order_matches_mpmath() {
        // mpmath.besselk(9.5j, 0.2), besselk(0.7j, 1.5), besselk(5j, 8)
        let cases = [
            (9.5, 0.2, 4.845_402_901_922_228e-9),
            (0.7, 1.5, 0.187_701_415_470_213_9),
            (5.0, 8.0, 3.216_147_330_072_809e-5),
        ];
        for &(t, y, exact) in &cases {
            let v = bessel_k(C64::new(0.0, t), y, &cfg()).unwrap();
            assert!(((v.re - exact) / exact).abs() < 1e-12, "t={t} y={y} {v} vs {exact}");
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn complex_order_matches_mpmath() {
        // mpmath.besselk(1.3+2.2j, 0.9)
        let v = bessel_k(C64::new(1.3, 2.2), 0.9, &cfg()).unwrap();
        let exact = C64::new(-0.171_380_247_002_978_15, 0.125_491_548_821_825_72);
        assert!((v - exact).norm() / exact.norm() < 1e-12, "{v}");
    }

    #[test]
    fn large_argument_scaled() {
        let v = bessel_k_scaled(C64::new(0.0, 3.0), 800.0, &cfg()).unwrap();
        // asymptotic e^y K ~ sqrt(π/2y)(1 + (4μ²−1)/(8y) + (4μ²−1)(4μ²−9)/(2(8y)²))
        let m = -36.0;
        let approx = (PI / 1600.0).sqrt() * (1.0 + (m - 1.0) / 6400.0 + (m - 1.0) * (m - 9.0) / (2.0 * 6400.0 * 6400.0));
        assert!(((v.re - approx) / approx).abs() < 1e-7);
    }

    #[test]
    fn bad_argument() {
        assert!(bessel_k(C64::new(0.0, 1.0), 0.0, &cfg()).is_err());
        assert!(bessel_k(C64::new(0.0, 1.0), -1.0, &cfg()).is_err());
    }
}
