//! Whittaker W_{κ,μ}(y) by numerical Mellin–Barnes quadrature (Eq. 2.2.8):
//!
//! ```text
//! W_{κ,μ}(y) = e^{−y/2}/(Γ(½−κ−μ)Γ(½−κ+μ)) · (1/2πi)∫_C Γ(u−κ)Γ(½−μ−u)Γ(½+μ−u) y^u du
//! ```
//!
//! The contour is a vertical line placed at the real-axis saddle of the
//! integrand between the pole families. When the families interleave (κ large),
//! the line sits just right of κ and the crossed right-family residues are added
//! back. For |Im μ| > 1.5 the line carries a pole-free bulge to the right on
//! |Im u| < |Im μ| − ½. There the integrand on the line is larger than the result
//! by ~e^{π|Im μ|/2}, and the bulge removes that cancellation.
//!
//! When ½ − κ ± μ is a non-positive integer −N, the gamma prefactor vanishes while
//! the contour is pinched. In that case W is evaluated by its exact limit
//! (−1)^N N! e^{−y/2} y^{½±μ} L_N^{(±2μ)}(y), a generalized Laguerre polynomial.
//! When the pinch is within 1e-3 but not exact, [`whittaker_w`] reports a method
//! error. [`whittaker_w_flagged`] then perturbs μ by 1e-6, evaluates with a relaxed
//! collision guard, and flags the result.

use super::gamma::{is_gamma_pole, rgamma};
use super::mb::{Bulge, ContourOptions, GammaFactor, MbIntegral, Placement, COLLISION_GAP};
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use num_complex::Complex64 as C64;

/// Generalized Laguerre polynomial L_N^{(α)}(y) by the three-term recurrence.
fn laguerre(n: usize, alpha: C64, y: f64) -> C64 {
    let mut l0 = C64::new(1.0, 0.0);
    if n == 0 {
        return l0;
    }
    let mut l1 = alpha + 1.0 - y;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((alpha + 2.0 * kf + 1.0 - y) * l1 - (alpha + kf) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// e^{y/2}W in the degenerate case ½ − κ + σμ = −N (σ = ±1), if it applies.
fn degenerate_scaled(kappa: f64, mu: C64, y: f64) -> Option<C64> {
    for sigma in [1.0, -1.0] {
        let a = C64::new(0.5 - kappa, 0.0) + mu * sigma;
        if is_gamma_pole(a) {
            let n = (-a.re).round() as usize;
            let mut fact = 1.0;
            for j in 2..=n {
                fact *= j as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let pow = ((mu * sigma + 0.5) * y.ln()).exp();
            return Some(pow * laguerre(n, mu * (2.0 * sigma), y) * (sign * fact));
        }
    }
    None
}

/// e^{y/2}W by the Laplace integral (DLMF 13.16.5, rescaled by t = s/y):
///
/// ```text
/// e^{y/2}W_{κ,μ}(y) = y^κ/Γ(α) ∫₀^∞ e^{−s} s^{α−1} (1 + s/y)^β ds,   α = ½+μ−κ, β = μ+κ−½,
/// ```
///
/// valid for Re α > 0 (W is even in μ, so Re μ ≥ 0 is used). The integral is
/// evaluated by exp-sinh (double-exponential) quadrature, halving the step until two
/// levels agree. Returns `None` outside the fast-path region, which is Re α ≥ 0.3 and
/// |Im μ| ≤ 8. Oscillation of s^{i·Im α} would otherwise need too many levels.
fn laplace_scaled(kappa: f64, mu: C64, y: f64) -> Option<C64> {
    let mu = if mu.re < 0.0 { -mu } else { mu };
    let alpha = mu + 0.5 - kappa;
    let beta = mu + kappa - 0.5;
    if alpha.re < 0.3 || mu.im.abs() > 8.0 {
        return None;
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let logf = |tau: f64| -> C64 {
        let ls = half_pi * tau.sinh();
        let sv = ls.exp();
        C64::new(-sv + (half_pi * tau.cosh()).ln(), 0.0) + alpha * ls + beta * (sv / y).ln_1p()
    };
    // Truncation range: walk outwards from τ = 0 until the integrand is negligible.
    let peak_log = (0..=80).map(|j| logf(-4.0 + 0.1 * j as f64).re).fold(f64::NEG_INFINITY, f64::max);
    let cut = peak_log - 42.0;
    let mut tau_lo = 0.0;
    while logf(tau_lo).re > cut || tau_lo > -0.5 {
        tau_lo -= 0.125;
        if tau_lo < -8.0 {
            return None;
        }
    }
    let mut tau_hi = 0.0;
    while logf(tau_hi).re > cut || tau_hi < 0.5 {
        tau_hi += 0.125;
        if tau_hi > 6.0 {
            return None;
        }
    }
    let f = |tau: f64| logf(tau).exp();
    let mut h = 0.125;
    let n0 = ((tau_hi - tau_lo) / h).round() as i64;
    let mut sum = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    for j in 0..=n0 {
        let v = f(tau_lo + h * j as f64);
        sum += v;
        scale += v.norm();
    }
    let mut prev = sum * h;
    let mut n = n0;
    for _level in 0..7 {
        // add midpoints
        for j in 0..n {
            let v = f(tau_lo + h * (j as f64 + 0.5));
            sum += v;
            scale += v.norm();
        }
        n *= 2;
        h *= 0.5;
        let cur = sum * h;
        if (cur - prev).norm() <= 2e-15 * scale * h {
            // decline when oscillation cancels more than three digits
            if scale * h > 1e3 * cur.norm() {
                return None;
            }
            let pre = (C64::new(kappa * y.ln(), 0.0) - super::gamma::log_gamma(alpha).ok()?).exp();
            return Some(pre * cur);
        }
        prev = cur;
    }
    None
}

fn integral(kappa: f64, mu: C64, y: f64, cfg: &PrecisionConfig, pinched: bool) -> Result<C64> {
    if let Some(v) = degenerate_scaled(kappa, mu, y) {
        return Ok(v);
    }
    if !pinched {
        if let Some(v) = laplace_scaled(kappa, mu, y) {
            return Ok(v);
        }
    }
    mb_scaled(kappa, mu, y, cfg, pinched)
}

fn mb_scaled(kappa: f64, mu: C64, y: f64, cfg: &PrecisionConfig, pinched: bool) -> Result<C64> {
    let half = C64::new(0.5, 0.0);
    let pre = rgamma(half - kappa - mu) * rgamma(half - kappa + mu);
    let mb = MbIntegral::new(
        vec![GammaFactor::plus(C64::new(-kappa, 0.0)), GammaFactor::minus(half - mu), GammaFactor::minus(half + mu)],
        vec![],
        C64::new(y.ln(), 0.0),
    );
    let t = mu.im.abs();
    let bulge = if t > 1.5 { Some(Bulge { v_lo: -(t - 0.5), v_hi: t - 0.5, c_right: None }) } else { None };
    let opts = if pinched {
        // Near-pinch retry: put the line half-way past the last left pole so it stays
        // clear of both families; the crossed right poles are compensated by residues.
        ContourOptions { placement: Placement::Fixed(kappa + 0.5), bulge, extra_height: 0.0, collision_gap: 1e-12 }
    } else {
        ContourOptions { placement: Placement::Saddle, bulge, extra_height: 0.0, collision_gap: COLLISION_GAP }
    };
    let out = mb.evaluate(&opts, cfg)?;
    Ok(out.value * pre)
}

/// e^{y/2}·W_{κ,μ}(y). Errors on pole collisions (see [`whittaker_w_flagged`]).
pub fn whittaker_w_scaled(kappa: f64, mu: C64, y: f64, cfg: &PrecisionConfig) -> Result<C64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain(format!("whittaker_w: y = {y} must be positive")));
    }
    integral(kappa, mu, y, cfg, false)
}

/// W_{κ,μ}(y) for real κ, complex μ, y > 0.
pub fn whittaker_w(kappa: f64, mu: C64, y: f64, cfg: &PrecisionConfig) -> Result<C64> {
    Ok(whittaker_w_scaled(kappa, mu, y, cfg)? * (-0.5 * y).exp())
}

/// W_{κ,μ}(y). On a pole collision, μ is perturbed by 1e-6 and the result is flagged.
/// Returns `(value, perturbed)`.
pub fn whittaker_w_flagged(kappa: f64, mu: C64, y: f64, cfg: &PrecisionConfig) -> Result<(C64, bool)> {
    match whittaker_w(kappa, mu, y, cfg) {
        Err(Error::Method(msg)) => {
            log::warn!("whittaker_w({kappa}, {mu}, {y}): {msg}; retrying with μ + 1e-6");
            let v = integral(kappa, mu + 1e-6, y, cfg, true)? * (-0.5 * y).exp();
            Ok((v, true))
        }
        other => other.map(|v| (v, false)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel::bessel_k;
    use std::f64::consts::PI;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn closed_form_half() {
        let v = whittaker_w(0.0, C64::new(0.5, 0.0), 2.0, &cfg()).unwrap();
        assert!((v.re - (-1.0f64).exp()).abs() < 1e-13, "{v}");
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn bessel_bridge_small() {
        let mu = C64::new(0.0, 0.7);
        let w = whittaker_w(0.0, mu, 3.0, &cfg()).unwrap();
        let k = bessel_k(mu, 1.5, &cfg()).unwrap() * (3.0 / PI).sqrt();
        assert!((w - k).norm() / k.norm() < 1e-12, "{w} vs {k}");
    }

    #[test]
    fn matches_mpmath() {
        // mpmath.whitw(kappa, mu, y)
        let cases: [(f64, C64, f64, C64); 5] = [
            (6.0, C64::new(0.3, 0.0), 50.0, C64::new(0.110_419_571_085_140_77, 0.0)),
            (-6.0, C64::new(0.2, 0.9), 3.0, C64::new(7.586_512_339_538_173e-7, 4.279_674_298_918_507e-8)),
            (2.5, C64::new(0.1, 1.0), 0.7, C64::new(0.262_443_493_030_240_73, -0.056_657_138_689_232_62)),
            (0.0, C64::new(0.0, 9.5), 0.4, C64::new(1.728_960_033_959_213_5e-9, 0.0)),
            (-6.0, C64::new(0.25, 0.0), 600.0, C64::new(1.029_344_863_438_79e-147, 0.0)),
        ];
        for (kappa, mu, y, exact) in cases {
            let v = whittaker_w(kappa, mu, y, &cfg()).unwrap();
            assert!((v - exact).norm() / exact.norm() < 1e-11, "W({kappa},{mu},{y}) = {v} vs {exact}");
        }
    }

    #[test]
    fn laplace_path_matches_mellin_barnes() {
        let mut worst: f64 = 0.0;
        for kappa in [0.0, -6.0, -2.5, 1.2] {
            for mu in [C64::new(0.3, 0.5), C64::new(0.0, 3.0), C64::new(1.7, -0.2), C64::new(-0.45, 0.1), C64::new(0.0, 7.5)] {
                for y in [0.05, 0.4, 2.0, 13.0, 150.0, 3000.0] {
                    let Some(fast) = laplace_scaled(kappa, mu, y) else { continue };
                    let slow = mb_scaled(kappa, mu, y, &cfg(), false).unwrap();
                    let rel = (fast - slow).norm() / slow.norm();
                    worst = worst.max(rel);
                    assert!(rel < 1e-11, "κ={kappa} μ={mu} y={y}: {fast} vs {slow}");
                }
            }
        }
        assert!(worst < 1e-11);
        // outside the region the fast path declines
        assert!(laplace_scaled(6.0, C64::new(0.3, 0.0), 5.0).is_none());
    }

    #[test]
    fn asymptotic_large_y() {
        // Leading asymptote e^{−y/2}y^κ; the first correction is (μ² − (κ−½)²)/y,
        // so at y = 50 the ratio is ≈ 0.51 (mpmath: 0.508848) and only approaches 1 slowly.
        let v = whittaker_w(6.0, C64::new(0.3, 0.0), 50.0, &cfg()).unwrap();
        let ratio = v.re / ((-25.0f64).exp() * 50f64.powf(6.0));
        assert!((ratio - 0.508_848_006_455_224).abs() < 1e-9, "ratio {ratio}");
        let y = 400.0;
        let v = whittaker_w(6.0, C64::new(0.3, 0.0), y, &cfg()).unwrap();
        let ratio = v.re / ((-y / 2.0).exp() * y.powf(6.0));
        assert!((0.8..=1.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn recurrence_2217() {
        // W_{λ,μ}(y)·2μ = √y (W_{λ+½,μ+½}(y) − W_{λ+½,μ−½}(y))
        for &(lam, mu, y) in &[(0.3, C64::new(0.8, 0.4), 1.7), (-1.2, C64::new(1.3, -2.0), 4.0), (2.0, C64::new(0.6, 0.1), 9.0)] {
            let lhs = whittaker_w(lam, mu, y, &cfg()).unwrap() * (mu * 2.0);
            let rhs = (whittaker_w(lam + 0.5, mu + 0.5, y, &cfg()).unwrap() - whittaker_w(lam + 0.5, mu - 0.5, y, &cfg()).unwrap()) * y.sqrt();
            assert!((lhs - rhs).norm() / lhs.norm() < 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn degenerate_closed_forms() {
        // mpmath: whitw(1, 0.5, 1.3) = 1.3 e^{-0.65}; whitw(3, -0.5, 2)
        let v = whittaker_w(1.0, C64::new(0.5, 0.0), 1.3, &cfg()).unwrap();
        assert!((v.re - 1.3 * (-0.65f64).exp()).abs() < 1e-15, "{v}");
        let v = whittaker_w(3.0, C64::new(-0.5, 0.0), 2.0, &cfg()).unwrap();
        let exact = C64::new(-1.471_517_764_685_769_3, 0.0);
        assert!((v - exact).norm() / exact.norm() < 1e-13, "{v}");
        assert!(whittaker_w(0.0, C64::new(0.5, 0.0), 0.0, &cfg()).is_err());
    }

    #[test]
    fn near_collision_is_flagged() {
        let mu = C64::new(0.5 + 2e-4, 0.0);
        assert!(matches!(whittaker_w(1.0, mu, 1.3, &cfg()), Err(Error::Method(_))));
        let (v, flagged) = whittaker_w_flagged(1.0, mu, 1.3, &cfg()).unwrap();
        assert!(flagged);
        let exact = 0.678_763_945_669_210_2;
        assert!((v.re - exact).abs() / exact < 1e-6, "{v} vs {exact}");
    }
}
