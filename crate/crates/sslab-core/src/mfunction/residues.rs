//! Exact residues of M_k(s, z/i, δ) in s (Eq. 2.2.56/2.2.57) and in z (Eq. 2.2.61/2.2.62),
//! their δ → 0 leading terms (Eq. 2.2.20, 2.2.63, 2.2.66), and a small-circle
//! contour-integral oracle.

use super::{dist_nonpos_int, EPS_POLE};
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::specfun::gamma::ln_gamma_mod;
use crate::specfun::mb::{ContourOptions, GammaFactor, MbIntegral};
use crate::specfun::rgamma;
use crate::util::sum::{kahan_sum_c, par_map};
use crate::C64;

/// Which pole of a ± pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn f(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn ln_fact(n: usize) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}

fn parity(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("δ = {delta} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_half_integer(z: C64) -> Result<()> {
    let tz = z * 2.0;
    if tz.im.abs() < 1e-9 && (tz.re - tz.re.round()).abs() < 1e-9 {
        return Err(Error::domain(format!(
            "m_residue_s: z = {z} ∈ ½ℤ is the double-pole regime (Laurent data of Eq. 2.2.21 not implemented)"
        )));
    }
    Ok(())
}

/// Res_{s = ½ − ℓ ± z} M_k(s, z/i, δ).
///
/// For `Plus` (s₀ = ½ − ℓ + z) the pole comes from Γ(s − ½ − z) in the prefactor of
/// Eq. 2.2.32, and the residue is that prefactor's residue times the Mellin–Barnes
/// integral at s₀ (Eq. 2.2.56). For `Minus` (s₀ = ½ − ℓ − z) the contour is pinched
/// between Γ(s − ½ + z + u) and Γ(−u), which gives the finite sum Eq. 2.2.57.
pub fn m_residue_s(ell: usize, sign: Sign, z: C64, k: f64, delta: f64, cfg: &PrecisionConfig) -> Result<C64> {
    check_delta(delta)?;
    check_half_integer(z)?;
    let b = z - 0.5 * k + 0.5;
    if dist_nonpos_int(b) < EPS_POLE {
        return Err(Error::domain(format!("m_residue_s: z − k/2 + 1/2 = {b} is a pole of Γ")));
    }
    let x = 2.0 / delta - 1.0;
    let l2 = 2f64.ln();
    match sign {
        Sign::Plus => {
            let lf = ell as f64;
            let mb = MbIntegral::new(
                vec![GammaFactor::plus(z * 2.0 - lf), GammaFactor::plus(b), GammaFactor::minus(C64::new(0.0, 0.0))],
                vec![GammaFactor::plus(z + 0.5 - lf - 0.5 * k)],
                C64::new(x.ln(), 0.0),
            );
            let i = mb.evaluate(&ContourOptions::default(), cfg)?.value;
            let pre = ((z + 0.5) * l2 - ln_fact(ell) + (-z * 2.0 + lf) * delta.ln()).exp() * rgamma(b) * parity(ell);
            Ok(pre * i)
        }
        Sign::Minus => {
            let m = ell;
            let mf = m as f64;
            let mut terms = Vec::with_capacity(m + 1);
            for l in 0..=m {
                let lf = l as f64;
                let t = (ln_gamma_mod(z + 0.5 + mf - lf - 0.5 * k) - ln_fact(l) - ln_fact(m - l) - lf * x.ln()).exp()
                    * rgamma(-z + 0.5 - 0.5 * k - lf);
                terms.push(t);
            }
            let pre = ((z + 0.5) * l2 + ln_gamma_mod(-z * 2.0 - mf) + mf * (2.0 - delta).ln()).exp() * rgamma(b) * parity(m);
            Ok(pre * kahan_sum_c(&terms))
        }
    }
}

/// δ → 0 leading term of [`m_residue_s`] (Eq. 2.2.20):
/// (−1)^ℓ 2^{½+ℓ∓z}Γ(½∓z−k/2+ℓ)Γ(±2z−ℓ)/(ℓ!Γ(½−k/2+z)Γ(½−k/2−z)).
pub fn m_residue_s_leading(ell: usize, sign: Sign, z: C64, k: f64) -> Result<C64> {
    check_half_integer(z)?;
    let sg = sign.f();
    let lf = ell as f64;
    let v = ((-z * sg + 0.5 + lf) * 2f64.ln() + ln_gamma_mod(-z * sg + 0.5 - 0.5 * k + lf) + ln_gamma_mod(z * (2.0 * sg) - lf) - ln_fact(ell)).exp();
    Ok(v * rgamma(z + 0.5 - 0.5 * k) * rgamma(-z + 0.5 - 0.5 * k) * parity(ell))
}

/// Residues in z: `Minus` gives R₁ at z = ½ − s − m (Eq. 2.2.61) and `Plus` gives
/// R₂ at z = s + m − ½ (Eq. 2.2.62).
///
/// R₁ is the finite sum coming from the pinch of Γ(s−½+z+u) against Γ(−u). R₂ is the
/// residue of the prefactor Γ(s−½−z) times the Mellin–Barnes integral, evaluated
/// directly. Evaluating it directly makes the paper's finite-sum-plus-line split
/// (Eq. 2.2.64/2.2.65) unnecessary.
pub fn m_residue_z(m: usize, sign: Sign, s: C64, k: f64, delta: f64, cfg: &PrecisionConfig) -> Result<C64> {
    check_delta(delta)?;
    let mf = m as f64;
    let x = 2.0 / delta - 1.0;
    let l2 = 2f64.ln();
    let g = s * 2.0 + mf - 1.0;
    if dist_nonpos_int(g) < EPS_POLE {
        return Err(Error::domain(format!(
            "m_residue_z: 2s + m − 1 = {g} ∈ ℤ≤0 — the z-poles coincide (double pole), not implemented"
        )));
    }
    match sign {
        Sign::Minus => {
            let mut terms = Vec::with_capacity(m + 1);
            for l in 0..=m {
                let lf = l as f64;
                let t = (ln_gamma_mod(-s + 1.0 - 0.5 * k - lf) - ln_fact(l) - ln_fact(m - l) - lf * x.ln()).exp() * rgamma(s + mf - 0.5 * k - lf);
                terms.push(t);
            }
            let pre = ((-s + 1.0 - mf) * l2 + mf * (2.0 - delta).ln() + ln_gamma_mod(g)).exp() * rgamma(-s + 1.0 - mf - 0.5 * k) * parity(m);
            Ok(pre * kahan_sum_c(&terms))
        }
        Sign::Plus => {
            let mb = MbIntegral::new(
                vec![GammaFactor::plus(g), GammaFactor::plus(s + mf - 0.5 * k), GammaFactor::minus(C64::new(0.0, 0.0))],
                vec![GammaFactor::plus(s - 0.5 * k)],
                C64::new(x.ln(), 0.0),
            );
            let i = mb.evaluate(&ContourOptions::default(), cfg)?.value;
            let pre = ((s + mf) * l2 - ln_fact(m) - g * delta.ln()).exp() * rgamma(s + mf - 0.5 * k) * (-parity(m));
            Ok(pre * i)
        }
    }
}

/// δ → 0 leading term of [`m_residue_z`] (Eq. 2.2.63 for R₁, and its negative, Eq. 2.2.66,
/// for R₂): ∓2^{1−s}(−1)^mΓ(2s+m−1)Γ(1−s−k/2)/(m!Γ(1−s−m−k/2)Γ(s+m−k/2)).
pub fn m_residue_z_leading(m: usize, sign: Sign, s: C64, k: f64) -> Result<C64> {
    let mf = m as f64;
    let g = s * 2.0 + mf - 1.0;
    if dist_nonpos_int(g) < EPS_POLE {
        return Err(Error::domain("m_residue_z_leading: double pole"));
    }
    let v = ((-s + 1.0) * 2f64.ln() + ln_gamma_mod(g) + ln_gamma_mod(-s + 1.0 - 0.5 * k) - ln_fact(m)).exp()
        * rgamma(-s + 1.0 - mf - 0.5 * k)
        * rgamma(s + mf - 0.5 * k)
        * parity(m);
    Ok(match sign {
        Sign::Minus => v,
        Sign::Plus => -v,
    })
}

/// (1/2πi)∮_{|w−c|=r} f(w) dw by the n-point trapezoid rule, which is spectrally
/// accurate for meromorphic f with no other poles nearby.
pub fn small_circle<F>(f: F, center: C64, radius: f64, n: usize) -> Result<C64>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let vals: Vec<Result<C64>> = par_map(0, n, |j| {
        let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64);
        f(center + e * radius).map(|v| v * e * radius)
    });
    let vals: Vec<C64> = vals.into_iter().collect::<Result<_>>()?;
    Ok(kahan_sum_c(&vals) / n as f64)
}

/// One residue compared against its small-circle oracle.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ResidueCheck {
    /// "s" or "z": the variable the residue is taken in.
    pub variable: &'static str,
    /// ℓ (in s) or m (in z).
    pub index: usize,
    pub sign: Sign,
    pub k: f64,
    pub delta: f64,
    /// The fixed other variable (z for residues in s, s for residues in z).
    pub fixed: C64,
    pub pole: C64,
    pub exact: C64,
    pub oracle: C64,
    pub rel: f64,
}

/// The standard set of tested poles: residues in s at ℓ ∈ {0, 1} (both signs, k = 0)
/// and one k = −12 pole; residues in z at m ∈ {0, 1}. The oracle is a 48-point small
/// circle of radius 0.05 (in s) or 0.03 (in z) around the pole, evaluating M by
/// [`super::m_contour`].
pub fn standard_residue_checks(cfg: &PrecisionConfig) -> Result<Vec<ResidueCheck>> {
    use super::{default_contour_shift, m_contour, MFunctionParams};
    let mc = |k: f64, s: C64, z: C64, d: f64| -> Result<C64> {
        let p = MFunctionParams::new(k, s, z, d)?;
        m_contour(&p, default_contour_shift(&p), cfg)
    };
    let c = C64::new;
    let mut out = Vec::new();
    let mut push = |variable, index, sign, k, delta, fixed, pole, exact: C64, oracle: C64| {
        let rel = (oracle - exact).norm() / exact.norm();
        out.push(ResidueCheck { variable, index, sign, k, delta, fixed, pole, exact, oracle, rel });
    };
    let in_s = [(0.0, c(0.0, 0.37), 0.05, 0usize, Sign::Plus), (0.0, c(0.0, 0.37), 0.05, 0, Sign::Minus), (0.0, c(0.0, 0.37), 0.05, 1, Sign::Plus), (0.0, c(0.0, 0.37), 0.05, 1, Sign::Minus), (-12.0, c(0.15, 0.6), 0.3, 0, Sign::Plus)];
    for (k, z, d, ell, sign) in in_s {
        let s0 = z * sign.f() + 0.5 - ell as f64;
        let oracle = small_circle(|s| mc(k, s, z, d), s0, 0.05, 48)?;
        let exact = m_residue_s(ell, sign, z, k, d, cfg)?;
        push("s", ell, sign, k, d, z, s0, exact, oracle);
    }
    let in_z = [(c(0.45, 0.0), 0usize, Sign::Minus), (c(0.45, 0.0), 0, Sign::Plus), (c(-0.4, 0.7), 1, Sign::Minus)];
    for (s, m, sign) in in_z {
        let (k, d) = (0.0, 0.05);
        let z0 = match sign {
            Sign::Minus => -s + 0.5 - m as f64,
            Sign::Plus => s - 0.5 + m as f64,
        };
        let oracle = small_circle(|z| mc(k, s, z, d), z0, 0.03, 48)?;
        let exact = m_residue_z(m, sign, s, k, d, cfg)?;
        push("z", m, sign, k, d, s, z0, exact, oracle);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{default_contour_shift, m_contour, MFunctionParams};
    use super::*;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }
    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }
    fn mc(k: f64, s: C64, z: C64, d: f64) -> Result<C64> {
        let p = MFunctionParams::new(k, s, z, d)?;
        m_contour(&p, default_contour_shift(&p), &cfg())
    }

    #[test]
    fn residue_in_s_matches_small_circle() {
        let (z, k, d) = (c(0.0, 0.37), 0.0, 0.05);
        for (ell, sign) in [(0usize, Sign::Plus), (0, Sign::Minus), (1, Sign::Plus), (1, Sign::Minus)] {
            let s0 = z * sign.f() + 0.5 - ell as f64;
            let oracle = small_circle(|s| mc(k, s, z, d), s0, 0.05, 48).unwrap();
            let exact = m_residue_s(ell, sign, z, k, d, &cfg()).unwrap();
            assert!((oracle - exact).norm() / exact.norm() < 1e-7, "ℓ={ell} {sign:?}: {oracle} vs {exact}");
        }
        // weight −12
        let z = c(0.15, 0.6);
        let oracle = small_circle(|s| mc(-12.0, s, z, 0.3), z + 0.5, 0.05, 48).unwrap();
        let exact = m_residue_s(0, Sign::Plus, z, -12.0, 0.3, &cfg()).unwrap();
        assert!((oracle - exact).norm() / exact.norm() < 1e-7, "{oracle} vs {exact}");
        assert!(matches!(m_residue_s(0, Sign::Plus, c(0.5, 0.0), 0.0, 0.1, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn residue_in_z_matches_small_circle() {
        let (s, k, d) = (c(0.45, 0.0), 0.0, 0.05);
        let z1 = -s + 0.5;
        let oracle = small_circle(|z| mc(k, s, z, d), z1, 0.03, 48).unwrap();
        let r1 = m_residue_z(0, Sign::Minus, s, k, d, &cfg()).unwrap();
        assert!((oracle - r1).norm() / r1.norm() < 1e-6, "{oracle} vs {r1}");
        let z2 = s - 0.5;
        let oracle = small_circle(|z| mc(k, s, z, d), z2, 0.03, 48).unwrap();
        let r2 = m_residue_z(0, Sign::Plus, s, k, d, &cfg()).unwrap();
        assert!((oracle - r2).norm() / r2.norm() < 1e-6, "{oracle} vs {r2}");
        // m = 1 with a complex s
        let s = c(-0.4, 0.7);
        let z1 = -s + 0.5 - 1.0;
        let oracle = small_circle(|z| mc(k, s, z, d), z1, 0.03, 48).unwrap();
        let r1 = m_residue_z(1, Sign::Minus, s, k, d, &cfg()).unwrap();
        assert!((oracle - r1).norm() / r1.norm() < 1e-6, "{oracle} vs {r1}");
    }

    #[test]
    fn leading_terms_with_linear_delta_error() {
        let (z, k) = (c(0.0, 0.37), 0.0);
        // ℓ = 0: the residue is δ-independent (₂F₁(a, b; b; −X) = (1 + X)^{−a})
        let lead = m_residue_s_leading(0, Sign::Plus, z, k).unwrap();
        let r = m_residue_s(0, Sign::Plus, z, k, 1e-3, &cfg()).unwrap();
        assert!((r - lead).norm() < 1e-12 * lead.norm());
        // ℓ = 1: the error is linear in δ
        for sign in [Sign::Plus, Sign::Minus] {
            let lead = m_residue_s_leading(1, sign, z, -12.0).unwrap();
            let e1 = (m_residue_s(1, sign, z, -12.0, 1e-2, &cfg()).unwrap() - lead).norm();
            let e2 = (m_residue_s(1, sign, z, -12.0, 1e-3, &cfg()).unwrap() - lead).norm();
            let ratio = e1 / e2;
            assert!(ratio > 9.0 && ratio < 11.0, "δ-scaling ratio {ratio}");
        }
        let s = c(0.45, 0.0);
        let lead = m_residue_z_leading(0, Sign::Minus, s, k).unwrap();
        let r = m_residue_z(0, Sign::Minus, s, k, 1e-9, &cfg()).unwrap();
        assert!((r - lead).norm() < 1e-7 * lead.norm());
        // m = 0: (2 − δ)^0 = 1, R₁ has a single term
        let r = m_residue_z(0, Sign::Minus, s, k, 0.3, &cfg()).unwrap();
        assert!((r - lead).norm() < 1e-13 * lead.norm());
        // R₂ = −R₁ at leading order
        let l2 = m_residue_z_leading(0, Sign::Plus, s, k).unwrap();
        assert!((l2 + lead).norm() < 1e-15 * lead.norm());
    }

    #[test]
    fn reflection_symmetry() {
        let (z, k, d) = (c(0.2, 0.7), 0.0, 0.1);
        for sign in [Sign::Plus, Sign::Minus] {
            let a = m_residue_s(1, sign, z, k, d, &cfg()).unwrap();
            let b = m_residue_s(1, sign, z.conj(), k, d, &cfg()).unwrap();
            assert!((a - b.conj()).norm() < 1e-10 * a.norm());
        }
    }
}
