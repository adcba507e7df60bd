//! Real-analytic Eisenstein series of even weight and real-analytic Poincaré series.
//!
//! * [`eisenstein_k_eval`] evaluates the completed series
//!   E^{*(k)}(z, ½+u) = π^{−s}Γ(s+k/2)ζ(2s)·E^{(k)}(z, s) by its Fourier expansion.
//!   The constant term is the two-term expression of Eq. 4.1.6, and the non-constant
//!   terms use W_{±k/2,u}(4π|n|y) and σ_{−2u}.
//! * [`eisenstein_lattice_eval`] and [`poincare_lattice_eval`] sum the defining
//!   coset series over coprime (c, d) directly. They require Re s ≥ 2.5.

use super::coeffs::divisor_sigma;
use super::petersson::Automorphic;
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::specfun::gamma::{is_gamma_pole, log_gamma};
use crate::specfun::{bessel_k, completed_zeta, whittaker_w, zeta};
use crate::util::sum::{par_sum_c, KahanC};
use crate::C64;
use std::f64::consts::PI;

/// Whether to return E^{(k)} or E^{*(k)}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Completion {
    Raw,
    Completed,
}

/// Parameters of E^{(k)}(z, s) / E^{*(k)}(z, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EisensteinParams {
    pub weight: u32,
    pub s: C64,
    pub completion: Completion,
}

impl EisensteinParams {
    pub fn new(weight: u32, s: C64, completion: Completion) -> Result<Self> {
        if weight % 2 != 0 {
            return Err(Error::domain(format!("Eisenstein series: weight {weight} must be even")));
        }
        Ok(Self { weight, s, completion })
    }
}

/// π^{−s}Γ(s+k/2)ζ(2s), the factor relating E^{*(k)} to E^{(k)}.
pub fn completion_factor(k: u32, s: C64) -> Result<C64> {
    let a = s + 0.5 * k as f64;
    if is_gamma_pole(a) {
        return Err(Error::domain(format!("completion factor: Γ(s + k/2) has a pole at s = {s}")));
    }
    Ok((log_gamma(a)? - s * PI.ln()).exp() * zeta(s * 2.0)?)
}

/// Γ(½+u+k/2)/Γ(½+u−k/2) = ∏_{j=0}^{k−1}(½+u−k/2+j), a polynomial in u.
fn gamma_ratio_poly(k: u32, u: C64) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for j in 0..k {
        p *= u + 0.5 - 0.5 * k as f64 + j as f64;
    }
    p
}

/// π^{−w/2}Γ(w/2 + k/2)ζ(w) = ζ*(w)·∏_{j<k/2}(w/2 + j), one constant-term coefficient
/// of Eq. 4.1.6 with w = 1 ± 2u.
///
/// Writing it through ζ* lets the trivial zeros of ζ cancel the poles of Γ. At w = 0 the
/// pole of ζ* is cancelled by the factor w/2 when k > 0, which leaves −½·(k/2 − 1)!.
fn xi_times_poly(w: C64, k: u32, s: C64) -> Result<C64> {
    let kh = k / 2;
    if w.norm() < 1e-12 {
        if kh == 0 {
            return Err(Error::domain(format!("E*^{{(0)}}(z, s): pole at s = {s}")));
        }
        let fact: f64 = (1..kh).map(|j| j as f64).product();
        return Ok(C64::new(-0.5 * fact, 0.0));
    }
    let mut p = completed_zeta(w)?;
    for j in 0..kh {
        p *= w * 0.5 + j as f64;
    }
    Ok(p)
}

/// Fourier-expansion evaluator of E^{(k)} or E^{*(k)}, row-based for quadrature.
#[derive(Debug, Clone)]
pub struct EisensteinSeries {
    pub params: EisensteinParams,
    cfg: PrecisionConfig,
    u: C64,
    c_plus: C64,
    c_minus: C64,
    ratio: C64,
    scale: C64,
}

impl EisensteinSeries {
    pub fn new(params: EisensteinParams, cfg: &PrecisionConfig) -> Result<Self> {
        let k = params.weight;
        let u = params.s - 0.5;
        if u.norm() < 1e-12 {
            return Err(Error::domain(
                "E*^{(k)}(z, s): s = 1/2 is a pole of both constant-term zeta factors (ζ(1 ± 2u)); excluded",
            ));
        }
        let c_plus = xi_times_poly(u * 2.0 + 1.0, k, params.s)?;
        let c_minus = xi_times_poly(-u * 2.0 + 1.0, k, params.s)?;
        let ratio = gamma_ratio_poly(k, u);
        let scale = match params.completion {
            Completion::Completed => C64::new(1.0, 0.0),
            Completion::Raw => completion_factor(k, params.s)?.inv(),
        };
        Ok(Self { params, cfg: *cfg, u, c_plus, c_minus, ratio, scale })
    }

    /// Constant term and (n, coefficient of e^{2πinx}, coefficient of e^{−2πinx}) at height y.
    fn radial(&self, y: f64) -> Result<(C64, Vec<(C64, C64)>)> {
        let k = self.params.weight;
        let kh = 0.5 * k as f64;
        let u = self.u;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let constant = self.c_plus * (u + 0.5) .scale_ln(y) + self.c_minus * (-u + 0.5).scale_ln(y);
        let mut coefs = Vec::new();
        let mut peak = constant.norm();
        let mut quiet = 0;
        let n_peak = ((kh + u.re.abs()) / (2.0 * PI * y)).ceil() as usize + 1;
        for n in 1..100_000usize {
            let nf = n as f64;
            let arg = 4.0 * PI * nf * y;
            let pre = divisor_sigma(-u * 2.0, n as u64) * (u - 0.5).scale_ln(nf) * sign;
            let (wp, wm) = if k == 0 {
                let w = bessel_k(u, 2.0 * PI * nf * y, &self.cfg)? * (2.0 * (nf * y).sqrt());
                (w, w)
            } else {
                (whittaker_w(kh, u, arg, &self.cfg)?, whittaker_w(-kh, u, arg, &self.cfg)?)
            };
            let cp = pre * wp;
            let cm = pre * self.ratio * wm;
            let mag = cp.norm() + cm.norm();
            peak = peak.max(mag);
            coefs.push((cp, cm));
            if n >= n_peak && mag < 1e-18 * peak {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        Ok((constant, coefs))
    }
}

trait ScaleLn {
    /// x^self for real x > 0.
    fn scale_ln(self, x: f64) -> C64;
}
impl ScaleLn for C64 {
    fn scale_ln(self, x: f64) -> C64 {
        (self * x.ln()).exp()
    }
}

impl Automorphic for EisensteinSeries {
    fn eval_row(&self, y: f64, xs: &[f64]) -> Result<Vec<C64>> {
        let (constant, coefs) = self.radial(y)?;
        Ok(xs
            .iter()
            .map(|&x| {
                let mut acc = KahanC::new();
                acc.add(constant);
                for (j, (cp, cm)) in coefs.iter().enumerate() {
                    let e = C64::from_polar(1.0, 2.0 * PI * (j + 1) as f64 * x);
                    acc.add(cp * e + cm * e.conj());
                }
                acc.value() * self.scale
            })
            .collect())
    }
}

/// E^{*(k)}(z, s) (or E^{(k)} for [`Completion::Raw`]) by the Fourier expansion.
pub fn eisenstein_k_eval(params: &EisensteinParams, z: C64, cfg: &PrecisionConfig) -> Result<C64> {
    if z.im < 0.5 {
        return Err(Error::domain(format!("eisenstein_k_eval: Im z = {} < 0.5", z.im)));
    }
    EisensteinSeries::new(*params, cfg)?.eval(z)
}

/// Radius R such that the coset-sum tail beyond |cz+d| > R is below tol·y^σ.
///
/// The count of coprime (c, d) with c > 0 and |cz+d| ∈ [r, r+dr] is about
/// (6/π²)(πr/y)dr. The tail is therefore ≈ (6/π)y^{σ−1}R^{2−2σ}/(2σ−2), and this
/// routine doubles that estimate for safety.
fn lattice_radius(sigma: f64, y: f64, tol: f64) -> f64 {
    let r = (12.0 / (PI * (2.0 * sigma - 2.0) * tol * y)).powf(1.0 / (2.0 * sigma - 2.0));
    r.max(4.0)
}

const MAX_LATTICE_TERMS: f64 = 5e7;

fn lattice_prepare(s: C64, z: C64, cfg: &PrecisionConfig, what: &str) -> Result<(f64, usize)> {
    if s.re < 2.5 {
        return Err(Error::domain(format!("{what}: Re s = {} < 2.5 (lattice sum not certified)", s.re)));
    }
    if !(z.im > 0.0) {
        return Err(Error::domain(format!("{what}: Im z must be positive")));
    }
    let tol = cfg.rel_tol.max(1e-14);
    let r = lattice_radius(s.re, z.im, tol);
    let count = 3.0 / PI * r * r / z.im;
    if count > MAX_LATTICE_TERMS {
        return Err(Error::accuracy(
            format!("{what}: tail bound needs ~{count:.1e} lattice terms (R = {r:.1}); loosen rel_tol or raise Re s"),
            tol,
        ));
    }
    Ok((r, (r / z.im).floor() as usize))
}

/// Inner sum over d for fixed c of `term(d)` on the disc |cz+d| ≤ R with gcd(c, d) = 1.
fn lattice_row<T: Fn(i64) -> C64>(c: usize, z: C64, r: f64, term: T) -> C64 {
    let cf = c as f64;
    let w2 = r * r - cf * cf * z.im * z.im;
    let mut acc = KahanC::new();
    if w2 < 0.0 {
        return acc.value();
    }
    let w = w2.sqrt();
    let lo = (-cf * z.re - w).ceil() as i64;
    let hi = (-cf * z.re + w).floor() as i64;
    for d in lo..=hi {
        if num_integer::gcd(c as i64, d.abs()) == 1 {
            acc.add(term(d));
        }
    }
    acc.value()
}

/// E^{(k)}(z, s) = y^s + Σ_{(c,d)=1, c>0} y^s|cz+d|^{k−2s}(cz+d)^{−k} by direct summation.
pub fn eisenstein_lattice_eval(k: u32, s: C64, z: C64, cfg: &PrecisionConfig) -> Result<C64> {
    if k % 2 != 0 {
        return Err(Error::domain("eisenstein_lattice_eval: weight must be even"));
    }
    let (r, cmax) = lattice_prepare(s, z, cfg, "eisenstein_lattice_eval")?;
    let kf = k as f64;
    let ys = s.scale_ln(z.im);
    let body = par_sum_c(1, cmax + 1, |c| {
        lattice_row(c, z, r, |d| {
            let q = z * c as f64 + d as f64;
            let (rho, theta) = q.to_polar();
            (s * (-2.0 * rho.ln()) - C64::new(0.0, kf * theta)).exp()
        })
    });
    Ok(ys * (body + 1.0))
}

/// Modular inverse of d modulo c (c ≥ 1, gcd = 1), in [0, c).
fn inv_mod(d: i64, c: i64) -> i64 {
    if c == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (d.rem_euclid(c), c);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(c)
}

/// P_h(z, s) = Σ_{γ∈Γ_∞\Γ} (Im γz)^s e^{2πih·γz} by direct summation.
pub fn poincare_lattice_eval(h: u64, s: C64, z: C64, cfg: &PrecisionConfig) -> Result<C64> {
    if h == 0 {
        return Err(Error::domain("poincare_lattice_eval: h must be ≥ 1"));
    }
    let (r, cmax) = lattice_prepare(s, z, cfg, "poincare_lattice_eval")?;
    let hf = h as f64;
    let ident = s.scale_ln(z.im) * (C64::new(0.0, 2.0 * PI * hf) * z).exp();
    let body = par_sum_c(1, cmax + 1, |c| {
        lattice_row(c, z, r, |d| {
            let cf = c as f64;
            let q = z * cf + d as f64;
            let a = inv_mod(d, c as i64) as f64;
            // γz = a/c − 1/(c(cz+d))
            let gz = C64::new(a / cf, 0.0) - (q * cf).inv();
            let im = z.im / q.norm_sqr();
            (s * im.ln() + C64::new(0.0, 2.0 * PI * hf) * gz).exp()
        })
    });
    Ok(ident + body)
}

/// Lattice-sum evaluator of P_h(·, s) for quadrature.
pub struct PoincareSeries {
    pub h: u64,
    pub s: C64,
    pub cfg: PrecisionConfig,
}

impl Automorphic for PoincareSeries {
    fn eval_row(&self, y: f64, xs: &[f64]) -> Result<Vec<C64>> {
        xs.iter().map(|&x| poincare_lattice_eval(self.h, self.s, C64::new(x, y), &self.cfg)).collect()
    }
}

/// Lattice-sum evaluator of E^{(k)}(·, s) for quadrature.
pub struct EisensteinLattice {
    pub k: u32,
    pub s: C64,
    pub cfg: PrecisionConfig,
}

impl Automorphic for EisensteinLattice {
    fn eval_row(&self, y: f64, xs: &[f64]) -> Result<Vec<C64>> {
        xs.iter().map(|&x| eisenstein_lattice_eval(self.k, self.s, C64::new(x, y), &self.cfg)).collect()
    }
}

/// The n-th Fourier coefficient ∫₀¹E^{(k)}(x+iy, s)e^{−2πinx} dx by the closed form Eq. 4.1.4.
pub fn eisenstein_fourier_closed(k: u32, s: C64, n: i64, y: f64, cfg: &PrecisionConfig) -> Result<C64> {
    if n == 0 {
        return Err(Error::domain("eisenstein_fourier_closed: n ≠ 0 required (use the constant term)"));
    }
    let kh = 0.5 * k as f64;
    let sg = if n > 0 { 1.0 } else { -1.0 };
    let an = n.unsigned_abs();
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let g = crate::specfun::rgamma(s + sg * kh);
    let w = whittaker_w(sg * kh, -s + 0.5, 4.0 * PI * an as f64 * y, cfg)?;
    Ok(s.scale_ln(PI) * divisor_sigma(-s * 2.0 + 1.0, an) * (s - 1.0).scale_ln(an as f64) / zeta(s * 2.0)? * g * w * sign)
}

/// The same coefficient by M-point trapezoid quadrature of the lattice sum in x.
/// The rule is spectrally accurate because the integrand is 1-periodic.
pub fn eisenstein_fourier_quadrature(k: u32, s: C64, n: i64, y: f64, m: usize, cfg: &PrecisionConfig) -> Result<C64> {
    let mut acc = KahanC::new();
    for j in 0..m {
        let x = (j as f64 + 0.5) / m as f64 - 0.5;
        let e = eisenstein_lattice_eval(k, s, C64::new(x, y), cfg)?;
        acc.add(e * C64::from_polar(1.0, -2.0 * PI * n as f64 * x));
    }
    Ok(acc.value() / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }
    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fourier_formula_matches_lattice_quadrature() {
        let lcfg = cfg().with_tol(1e-9);
        for k in [12u32, 0] {
            let q = eisenstein_fourier_quadrature(k, c(3.0, 0.0), 1, 1.0, 32, &lcfg).unwrap();
            let cf = eisenstein_fourier_closed(k, c(3.0, 0.0), 1, 1.0, &cfg()).unwrap();
            assert!((q - cf).norm() / cf.norm() < 1e-4, "k={k}: {q} vs {cf}");
        }
        // mpmath values of Eq. 4.1.4
        let v = eisenstein_fourier_closed(12, c(3.0, 0.0), 1, 1.0, &cfg()).unwrap();
        assert!((v.re + 0.085_088_494_713_376_63).abs() < 1e-12);
        let v = eisenstein_fourier_closed(0, c(3.0, 0.0), 1, 1.0, &cfg()).unwrap();
        assert!((v.re - 0.044_207_745_236_483_02).abs() < 1e-12);
    }

    #[test]
    fn lattice_symmetries() {
        let lcfg = cfg().with_tol(1e-10);
        let v = eisenstein_lattice_eval(0, c(3.0, 0.0), c(0.0, 1.0), &lcfg).unwrap();
        assert!(v.im.abs() < 1e-12 * v.re.abs());
        let z = c(0.23, 0.8);
        let a = eisenstein_lattice_eval(12, c(3.0, 0.5), z, &lcfg).unwrap();
        let b = eisenstein_lattice_eval(12, c(3.0, 0.5), z + 1.0, &lcfg).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm());
        assert!(matches!(eisenstein_lattice_eval(0, c(2.0, 0.0), z, &lcfg), Err(Error::Domain(_))));
        assert!(matches!(eisenstein_lattice_eval(0, c(2.6, 0.0), z, &cfg().with_tol(1e-16)), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn expansion_matches_lattice_at_weight_zero() {
        let lcfg = cfg().with_tol(1e-10);
        for (x, y) in [(0.0, 1.0), (0.3, 0.9), (-0.45, 1.4), (0.1, 2.0), (0.5, 0.87)] {
            let z = c(x, y);
            let s = c(3.0, 0.4 * x);
            let p = EisensteinParams::new(0, s, Completion::Raw).unwrap();
            let fe = eisenstein_k_eval(&p, z, &cfg()).unwrap();
            let la = eisenstein_lattice_eval(0, s, z, &lcfg).unwrap();
            assert!((fe - la).norm() / la.norm() < 1e-6, "z={z}: {fe} vs {la}");
        }
        // weight 12 as well, where the lattice sum is complex
        let z = c(0.2, 1.1);
        let p = EisensteinParams::new(12, c(3.0, 0.0), Completion::Raw).unwrap();
        let fe = eisenstein_k_eval(&p, z, &cfg()).unwrap();
        let la = eisenstein_lattice_eval(12, c(3.0, 0.0), z, &lcfg).unwrap();
        assert!((fe - la).norm() / la.norm() < 1e-6, "{fe} vs {la}");
    }

    #[test]
    fn functional_equation_and_periodicity() {
        for k in [0u32, 12] {
            for (s, z) in [(c(0.7, 0.3), c(0.1, 1.0)), (c(0.3, 2.0), c(-0.4, 0.8))] {
                let a = eisenstein_k_eval(&EisensteinParams::new(k, s, Completion::Completed).unwrap(), z, &cfg()).unwrap();
                let b = eisenstein_k_eval(&EisensteinParams::new(k, -s + 1.0, Completion::Completed).unwrap(), z, &cfg()).unwrap();
                assert!((a - b).norm() / a.norm() < 1e-8, "k={k} s={s}: {a} vs {b}");
                let c1 = eisenstein_k_eval(&EisensteinParams::new(k, s, Completion::Completed).unwrap(), z + 1.0, &cfg()).unwrap();
                assert!((a - c1).norm() / a.norm() < 1e-10);
            }
        }
        assert!(EisensteinParams::new(3, c(1.0, 0.0), Completion::Raw).is_err());
        let p = EisensteinParams::new(0, c(0.5, 0.0), Completion::Completed).unwrap();
        assert!(matches!(eisenstein_k_eval(&p, c(0.0, 1.0), &cfg()), Err(Error::Domain(_))));
        let p = EisensteinParams::new(0, c(1.0, 0.0), Completion::Completed).unwrap();
        assert!(matches!(eisenstein_k_eval(&p, c(0.0, 1.0), &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn poincare_series() {
        let lcfg = cfg().with_tol(1e-10);
        let s = c(3.0, 0.0);
        let z = c(0.17, 0.9);
        let a = poincare_lattice_eval(2, s, z, &lcfg).unwrap();
        let b = poincare_lattice_eval(2, s, z + 1.0, &lcfg).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm());
        // Γ-invariance under z ↦ −1/z
        let w = -z.inv();
        let b = poincare_lattice_eval(2, s, w, &lcfg).unwrap();
        assert!((a - b).norm() < 1e-8 * a.norm(), "{a} {b}");
        // high in the cusp the non-identity cosets have Im γz ≤ 1/y, so e^{2πihγz} ≈ 1:
        // P_h − y^s e^{2πihz} tracks E − y^s to relative O(2πh/y).
        let z = c(0.3, 10.0);
        for h in [1u64, 3] {
            let p = poincare_lattice_eval(h, s, z, &lcfg).unwrap();
            let e = eisenstein_lattice_eval(0, s, z, &lcfg).unwrap();
            let ys = 1000.0;
            let lead = (C64::new(0.0, 2.0 * PI * h as f64) * z).exp() * ys;
            let rest_p = p - lead;
            let rest_e = e - ys;
            assert!((rest_p - rest_e).norm() <= 2.0 * 2.0 * PI * h as f64 / 10.0 * rest_e.norm());
        }
        assert_eq!((inv_mod(-3, 7) * (-3i64)).rem_euclid(7), 1);
    }
}
