//! Upper incomplete gamma Γ[r, x] = ∫_x^∞ e^{−y} y^{r} dy/y (Eq. 2.2.18).

use super::gamma::{is_gamma_pole, log_gamma};
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use num_complex::Complex64 as C64;

fn cont_fraction(r: C64, x: f64, cfg: &PrecisionConfig) -> Result<C64> {
    // Lentz evaluation of Γ(r,x) = e^{−x}x^r / (x+1−r − 1(1−r)/(x+3−r − …))
    let tiny = C64::new(1e-150, 0.0); // keeps |1/tiny|² finite in complex division
    let mut b = C64::new(x + 1.0, 0.0) - r;
    let mut c = C64::new(1.0, 0.0) / tiny;
    let mut d = b.inv();
    let mut h = d;
    for i in 1..cfg.series_max_terms.max(10_000) {
        let fi = i as f64;
        let an = (C64::new(fi, 0.0) - r) * (-fi); // −i(i − r)
        b += 2.0;
        d = an * d + b;
        if d.norm() < 1e-150 {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < 1e-150 {
            c = tiny;
        }
        d = d.inv();
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            return Ok((r * x.ln() - x).exp() * h);
        }
    }
    Err(Error::accuracy("upper_incomplete_gamma: continued fraction did not converge", 1.0))
}

fn lower_series(r: C64, x: f64, cfg: &PrecisionConfig) -> Result<C64> {
    // γ(r,x) = x^r e^{−x} Σ xⁿ / (r(r+1)…(r+n))
    let mut term = r.inv();
    let mut acc = crate::util::sum::KahanC::new();
    acc.add(term);
    for n in 1..cfg.series_max_terms.max(10_000) {
        term *= C64::new(x, 0.0) / (r + n as f64);
        acc.add(term);
        if term.norm() < 1e-17 * acc.value().norm() {
            return Ok((r * x.ln() - x).exp() * acc.value());
        }
    }
    Err(Error::accuracy("upper_incomplete_gamma: series did not converge", 1.0))
}

/// Γ[r, x] for complex r and real x ≥ 0 (x = 0 requires Re r > 0).
pub fn upper_incomplete_gamma(r: C64, x: f64, cfg: &PrecisionConfig) -> Result<C64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("upper_incomplete_gamma: x = {x} must be ≥ 0")));
    }
    if x == 0.0 {
        if r.re <= 0.0 {
            return Err(Error::domain(format!("upper_incomplete_gamma: x = 0 requires Re r > 0 (r = {r})")));
        }
        return Ok(log_gamma(r)?.exp());
    }
    if x >= 1.5 && x >= r.re - 1.0 {
        return cont_fraction(r, x, cfg);
    }
    if r.re < 1.0 {
        // downward recurrence Γ[r,x] = (Γ[r+1,x] − x^r e^{−x})/r from Re ≥ 1
        let m = (1.0 - r.re).ceil() as usize;
        let mut g = upper_incomplete_gamma(r + m as f64, x, cfg)?;
        for j in (0..m).rev() {
            let rj = r + j as f64;
            if rj == C64::new(0.0, 0.0) {
                return Err(Error::domain("upper_incomplete_gamma: r = 0 reached in recurrence (use E1)"));
            }
            g = (g - (rj * x.ln() - x).exp()) / rj;
        }
        return Ok(g);
    }
    debug_assert!(!is_gamma_pole(r));
    Ok(log_gamma(r)?.exp() - lower_series(r, x, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::quad::adaptive_gk;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    fn quad_oracle(r: C64, x: f64) -> C64 {
        // ∫_x^{x+80} e^{−y} y^{r−1} dy by adaptive GK
        adaptive_gk(|y| (C64::new(-y, 0.0) + (r - 1.0) * y.ln()).exp(), x, x + 80.0 + r.norm(), 0.0, 1e-14, 2000).unwrap().0
    }

    #[test]
    fn trivial() {
        let v = upper_incomplete_gamma(C64::new(1.0, 0.0), 2.0, &cfg()).unwrap();
        assert!((v.re - (-2.0f64).exp()).abs() < 1e-16);
        let v = upper_incomplete_gamma(C64::new(3.5, 0.0), 0.0, &cfg()).unwrap();
        assert!((v.re - 3.323_350_970_447_842_6).abs() < 1e-13);
    }

    #[test]
    fn asymptotic_ratio() {
        let x = 40.0;
        let v = upper_incomplete_gamma(C64::new(2.5, 0.0), x, &cfg()).unwrap();
        let ratio = v.re / ((-x).exp() * x.powf(1.5));
        assert!((0.9..=1.1).contains(&ratio));
        let q = quad_oracle(C64::new(2.5, 0.0), x);
        assert!((v - q).norm() / q.norm() < 1e-12);
    }

    #[test]
    fn agrees_with_quadrature() {
        for &(re, im, x) in &[(0.3, 1.2, 0.5), (2.0, -0.7, 3.0), (-1.4, 0.5, 0.8), (5.5, 2.0, 1.0), (-2.5, 0.0, 4.0)] {
            let r = C64::new(re, im);
            let v = upper_incomplete_gamma(r, x, &cfg()).unwrap();
            let q = quad_oracle(r, x);
            assert!((v - q).norm() / q.norm() < 1e-11, "r={r} x={x}: {v} vs {q}");
        }
    }

    #[test]
    fn recurrence() {
        // Γ[r,x] = (r−1)Γ[r−1,x] + x^{r−1}e^{−x}
        for &(re, im, x) in &[(2.3, 0.4, 0.7), (0.6, -1.1, 2.5), (4.0, 3.0, 10.0)] {
            let r = C64::new(re, im);
            let lhs = upper_incomplete_gamma(r, x, &cfg()).unwrap();
            let rhs = (r - 1.0) * upper_incomplete_gamma(r - 1.0, x, &cfg()).unwrap() + ((r - 1.0) * x.ln() - x).exp();
            assert!((lhs - rhs).norm() / lhs.norm() < 1e-12);
        }
    }

    #[test]
    fn domain() {
        assert!(upper_incomplete_gamma(C64::new(-0.5, 0.0), 0.0, &cfg()).is_err());
        assert!(upper_incomplete_gamma(C64::new(1.0, 0.0), -1.0, &cfg()).is_err());
    }
}
