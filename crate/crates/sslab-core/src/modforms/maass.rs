//! Ingestion and evaluation of weight-0 Hecke–Maass cusp forms for SL₂(ℤ).
//!
//! Maass data is consumed, not computed. The loader's Hecke and automorphy checks
//! are the trust boundary.
//!
//! Conventions:
//!
//! * The raw expansion is u(z) = Σ_{n≤N} λ(n)·2√y·K_{it}(2πny)·trig(2πnx), with
//!   trig = cos for even forms and sin for odd forms.
//! * The L²-normalized real form is v = c·u with ⟨v, v⟩ = 1.
//! * In the two-sided convention μ(z) = Σ_{m≠0} ρ(m)·2√y·K_{it}(2π|m|y)e^{2πimx},
//!   v has ρ(m) = (c/2)λ(|m|) for even forms. For odd forms, ρ(±m) = ∓(ic/2)λ(m).
//! * `rho1` stores |ρ(1)| = c/2, with the phase of ρ(1) fixed real-positive for even
//!   forms.

use super::petersson::{petersson_inner, Automorphic};
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::specfun::bessel_k;
use crate::C64;
use std::f64::consts::PI;
use std::path::Path;

/// Parity under x ↦ −x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// A Hecke–Maass cusp form with spectral parameter t (eigenvalue ¼ + t²).
#[derive(Debug, Clone, PartialEq)]
pub struct MaassFormData {
    pub t: f64,
    pub parity: Parity,
    /// λ(n) for 1 ≤ n ≤ N, λ(1) = 1.
    pub lambda: Vec<f64>,
    /// |ρ(1)| in the two-sided convention (see module docs); 0 until normalized.
    pub rho1: f64,
    /// Automorphy residual measured at load time.
    pub automorphy_residual: f64,
}

/// The bundled dataset: every SL₂(ℤ) Maass cusp form with t ≤ 18.
pub const BUNDLED_DATASET_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/maass");
/// Completeness bound of [`BUNDLED_DATASET_DIR`].
pub const BUNDLED_T_COMPLETE: f64 = 18.0;

/// Load and validate every `*.txt` file of a directory, sorted by t.
pub fn maass_load_dir(dir: &Path, cfg: &PrecisionConfig) -> Result<Vec<MaassFormData>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Io(format!("no *.txt Maass data files in {}", dir.display())));
    }
    let mut forms = paths.iter().map(|p| maass_load(p, cfg)).collect::<Result<Vec<_>>>()?;
    forms.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(forms)
}

/// Default automorphy validation tolerance.
pub const VAL_TOL: f64 = 1e-4;
/// Hecke relations are checked to this absolute tolerance for mn ≤ N.
pub const HECKE_TOL: f64 = 1e-5;

impl MaassFormData {
    /// ρ(m) of the normalized form `maass_eval` (two-sided convention).
    pub fn rho(&self, m: i64) -> C64 {
        let n = m.unsigned_abs() as usize;
        if n == 0 || n > self.lambda.len() {
            return C64::new(0.0, 0.0);
        }
        let l = self.lambda[n - 1] * self.rho1;
        match self.parity {
            Parity::Even => C64::new(l, 0.0),
            Parity::Odd => C64::new(0.0, if m > 0 { -l } else { l }),
        }
    }

    /// λ(n) (0 beyond the table).
    pub fn lambda_at(&self, n: usize) -> f64 {
        if n == 0 || n > self.lambda.len() {
            0.0
        } else {
            self.lambda[n - 1]
        }
    }

    /// Raw expansion u(z) (unnormalized), truncated to the stored coefficients.
    pub fn raw_eval(&self, z: C64, cfg: &PrecisionConfig) -> Result<f64> {
        let radial = self.radial(z.im, cfg)?;
        Ok(self.combine(&radial, z.re))
    }

    fn radial(&self, y: f64, cfg: &PrecisionConfig) -> Result<Vec<f64>> {
        let mu = C64::new(0.0, self.t);
        let mut out = Vec::with_capacity(self.lambda.len());
        let mut peak: f64 = 0.0;
        for (i, &l) in self.lambda.iter().enumerate() {
            let n = (i + 1) as f64;
            let arg = 2.0 * PI * n * y;
            // K_{it}(x) ≤ K_0(x) ≲ e^{−x}·√(π/2x): stop once far below the peak term
            let bound = (PI / (2.0 * arg)).sqrt() * (-arg).exp() * 2.0 * y.sqrt() * l.abs().max(1.0) * n.sqrt();
            // (high in the cusp every term underflows, so peak may stay 0)
            if (peak > 0.0 && bound < 1e-18 * peak) || (arg > 1.0 && bound < 1e-300) {
                break;
            }
            let k = bessel_k(mu, arg, cfg)?.re;
            let r = l * 2.0 * y.sqrt() * k;
            peak = peak.max(r.abs());
            out.push(r);
        }
        Ok(out)
    }

    fn combine(&self, radial: &[f64], x: f64) -> f64 {
        let mut acc = crate::util::sum::Kahan::new();
        for (i, r) in radial.iter().enumerate() {
            let a = 2.0 * PI * (i + 1) as f64 * x;
            acc.add(r * match self.parity {
                Parity::Even => a.cos(),
                Parity::Odd => a.sin(),
            });
        }
        acc.value()
    }

    /// Normalization constant c = 2ρ₁ applied to the raw expansion.
    fn scale(&self) -> f64 {
        if self.rho1 > 0.0 {
            2.0 * self.rho1
        } else {
            1.0
        }
    }

    /// max_j |u(−1/z_j) − u(z_j)| / max_j |u(z_j)| over 10 fixed sample points with
    /// Im z_j, Im(−1/z_j) ≥ 0.8.
    pub fn compute_automorphy_residual(&self, cfg: &PrecisionConfig) -> Result<f64> {
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for j in 0..10 {
            let theta = (65.0 + 50.0 * j as f64 / 9.0).to_radians();
            let r = if j % 2 == 0 { 0.93 } else { 1.07 };
            let z = C64::from_polar(r, theta);
            let a = self.raw_eval(z, cfg)?;
            let b = self.raw_eval(-z.inv(), cfg)?;
            num = num.max((a - b).abs());
            den = den.max(a.abs());
        }
        Ok(num / den)
    }

    /// Check λ(1) = 1 and λ(m)λ(n) = Σ_{d|(m,n)} λ(mn/d²) for all mn ≤ N.
    pub fn check_hecke(&self) -> Result<()> {
        let n_max = self.lambda.len();
        if n_max == 0 || (self.lambda[0] - 1.0).abs() > 1e-12 {
            return Err(Error::Validation("Maass data: λ(1) must equal 1".into()));
        }
        for m in 2..=n_max {
            for n in m..=n_max / m {
                let g = num_integer::gcd(m, n);
                let mut rhs = 0.0;
                for d in 1..=g {
                    if g % d == 0 {
                        rhs += self.lambda[m * n / (d * d) - 1];
                    }
                }
                let lhs = self.lambda[m - 1] * self.lambda[n - 1];
                if (lhs - rhs).abs() > HECKE_TOL * (1.0 + rhs.abs()) {
                    return Err(Error::Validation(format!(
                        "Maass data: Hecke relation fails at (m, n) = ({m}, {n}): λ(m)λ(n) = {lhs}, Σ = {rhs}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Compute ρ₁ from the Petersson self-norm of the raw expansion.
    pub fn normalize(&mut self, cfg: &PrecisionConfig) -> Result<()> {
        self.rho1 = 0.0;
        let norm = petersson_inner(&*self, &*self, cfg)?.re;
        if !(norm > 0.0) {
            return Err(Error::Validation(format!("Maass data: non-positive self-norm {norm}")));
        }
        self.rho1 = 0.5 / norm.sqrt();
        Ok(())
    }

    /// Coarse plausibility of ρ₁ against e^{π|t|/2}·log(1+|t|) (within a factor 100).
    pub fn rho1_plausible(&self) -> bool {
        let scale = (0.5 * PI * self.t.abs()).exp() * (1.0 + self.t.abs()).ln();
        self.rho1 > scale / 100.0 && self.rho1 < scale * 100.0
    }
}

impl Automorphic for MaassFormData {
    fn eval_row(&self, y: f64, xs: &[f64]) -> Result<Vec<C64>> {
        let cfg = PrecisionConfig::default();
        let radial = self.radial(y, &cfg)?;
        let c = self.scale();
        Ok(xs.iter().map(|&x| C64::new(c * self.combine(&radial, x), 0.0)).collect())
    }
}

/// The L²-normalized real Maass form v(z) (see module docs for the phase).
///
/// Requires Im z ≥ 0.5 so that the stored coefficients suffice.
pub fn maass_eval(form: &MaassFormData, z: C64, cfg: &PrecisionConfig) -> Result<f64> {
    if z.im < 0.5 {
        return Err(Error::domain(format!("maass_eval: Im z = {} < 0.5; map z into the fundamental domain first", z.im)));
    }
    let radial = form.radial(z.im, cfg)?;
    // the tail after the stored coefficients: K decays like e^{−2πny}
    let n = form.lambda.len() as f64;
    let arg = 2.0 * PI * (n + 1.0) * z.im;
    let tail = 2.0 * z.im.sqrt() * (n + 1.0).sqrt() * (PI / (2.0 * arg)).sqrt() * (-arg).exp() * 4.0;
    let v = form.combine(&radial, z.re);
    let peak = radial.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if tail > cfg.rel_tol.max(1e-10) * peak {
        return Err(Error::accuracy(format!("maass_eval: {} coefficients insufficient at Im z = {}", form.lambda.len(), z.im), tail / peak));
    }
    Ok(form.scale() * v)
}

/// Parse the `maass-sl2z v1` text format without validation.
pub fn maass_parse(text: &str) -> Result<MaassFormData> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    if lines.next() != Some("maass-sl2z v1") {
        return Err(Error::Parse("missing `maass-sl2z v1` header".into()));
    }
    let mut t = None;
    let mut parity = None;
    let mut lambda: Vec<f64> = Vec::new();
    for line in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("t") => {
                let v = tok.next().and_then(|v| v.parse::<f64>().ok()).ok_or_else(|| Error::Parse(format!("bad t line `{line}`")))?;
                t = Some(v);
            }
            Some("parity") => {
                parity = Some(match tok.next() {
                    Some("even") => Parity::Even,
                    Some("odd") => Parity::Odd,
                    _ => return Err(Error::Parse(format!("bad parity line `{line}`"))),
                });
            }
            Some("coef") => {
                let n: usize = tok.next().and_then(|v| v.parse().ok()).ok_or_else(|| Error::Parse(format!("bad coef index in `{line}`")))?;
                let v: f64 = tok.next().and_then(|v| v.parse().ok()).ok_or_else(|| Error::Parse(format!("bad coef value in `{line}`")))?;
                if n != lambda.len() + 1 {
                    return Err(Error::Parse(format!("coef indices must increase from 1 without gaps; got {n} after {}", lambda.len())));
                }
                if n == 1 && v != 1.0 {
                    return Err(Error::Parse(format!("coef 1 must be 1.0, got {v}")));
                }
                lambda.push(v);
            }
            _ => return Err(Error::Parse(format!("unrecognised line `{line}`"))),
        }
        if tok.next().is_some() {
            return Err(Error::Parse(format!("trailing tokens in `{line}`")));
        }
    }
    let t = t.ok_or_else(|| Error::Parse("missing `t` line".into()))?;
    let parity = parity.ok_or_else(|| Error::Parse("missing `parity` line".into()))?;
    if lambda.is_empty() {
        return Err(Error::Parse("empty coefficient list".into()));
    }
    Ok(MaassFormData { t, parity, lambda, rho1: 0.0, automorphy_residual: f64::NAN })
}

/// Validate parsed data (Hecke relations, automorphy residual ≤ `val_tol`) and normalize.
pub fn maass_validate(mut data: MaassFormData, val_tol: f64, cfg: &PrecisionConfig) -> Result<MaassFormData> {
    data.check_hecke()?;
    let res = data.compute_automorphy_residual(cfg)?;
    data.automorphy_residual = res;
    if !(res <= val_tol) {
        return Err(Error::Validation(format!("Maass data (t = {}): automorphy residual {res:.3e} exceeds {val_tol:.1e}", data.t)));
    }
    data.normalize(cfg)?;
    Ok(data)
}

/// Load, validate, and normalize a Maass data file (automorphy tolerance [`VAL_TOL`]).
pub fn maass_load(path: &Path, cfg: &PrecisionConfig) -> Result<MaassFormData> {
    let text = std::fs::read_to_string(path)?;
    maass_validate(maass_parse(&text)?, VAL_TOL, cfg)
}

/// Write data in the `maass-sl2z v1` format.
pub fn maass_write(data: &MaassFormData) -> String {
    let mut s = String::from("maass-sl2z v1\n");
    s.push_str(&format!("t {:.17}\n", data.t));
    s.push_str(match data.parity {
        Parity::Even => "parity even\n",
        Parity::Odd => "parity odd\n",
    });
    for (i, l) in data.lambda.iter().enumerate() {
        if i == 0 {
            s.push_str("coef 1 1.0\n");
        } else {
            s.push_str(&format!("coef {} {:.17e}\n", i + 1, l));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::{eigenform_coefficients, VProduct};

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    fn data_dir() -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data/maass")
    }

    fn first_form_text() -> String {
        std::fs::read_to_string(data_dir().join("maass_odd_9.533695.txt")).unwrap()
    }

    #[test]
    fn load_normalize_and_evaluate() {
        let u = maass_load(&data_dir().join("maass_odd_9.533695.txt"), &cfg()).unwrap();
        assert_eq!(u.parity, Parity::Odd);
        assert!(u.automorphy_residual <= VAL_TOL);
        assert!(u.rho1_plausible(), "ρ₁ = {}", u.rho1);
        let n = petersson_inner(&u, &u, &cfg()).unwrap();
        assert!((n.re - 1.0).abs() < 1e-8 && n.im.abs() < 1e-12, "⟨u,u⟩ = {n}");
        // odd: vanishes on x = 0
        assert!(maass_eval(&u, C64::new(0.0, 0.8), &cfg()).unwrap().abs() < 1e-14);
        let z = C64::new(0.3, 0.9);
        let a = maass_eval(&u, z, &cfg()).unwrap();
        assert!((a - maass_eval(&u, z + 1.0, &cfg()).unwrap()).abs() < 1e-12);
        let w = -z.inv();
        let b = maass_eval(&u, w, &cfg()).unwrap();
        assert!((a - b).abs() <= VAL_TOL * a.abs().max(1.0), "{a} vs {b}");
        assert!(matches!(maass_eval(&u, C64::new(0.0, 0.3), &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn whole_dataset_validates() {
        let mut n = 0;
        for e in std::fs::read_dir(data_dir()).unwrap() {
            let d = maass_load(&e.unwrap().path(), &cfg()).unwrap();
            assert!(d.automorphy_residual <= VAL_TOL);
            n += 1;
        }
        assert!(n >= 7);
    }

    #[test]
    fn rejections() {
        assert!(matches!(maass_parse("maass-sl2z v1\nt 9.5\nparity odd\n"), Err(Error::Parse(_))));
        assert!(matches!(maass_parse("maass-sl2z v1\nt 9.5\nparity odd\ncoef 2 1.0\n"), Err(Error::Parse(_))));
        assert!(matches!(maass_parse("maass-sl2z v2\n"), Err(Error::Parse(_))));
        // Hecke-inconsistent λ(4) ≠ λ(2)² − 1
        let mut d = maass_parse(&first_form_text()).unwrap();
        d.lambda[3] += 0.1;
        assert!(matches!(maass_validate(d, VAL_TOL, &cfg()), Err(Error::Validation(_))));
    }

    #[test]
    fn perturbed_t_raises_residual() {
        let d = maass_parse(&first_form_text()).unwrap();
        let r0 = d.compute_automorphy_residual(&cfg()).unwrap();
        let mut p = d.clone();
        p.t += 0.01;
        let r1 = p.compute_automorphy_residual(&cfg()).unwrap();
        assert!(r1 >= 10.0 * r0, "{r0} → {r1}");
        assert!(matches!(maass_validate(p, VAL_TOL, &cfg()), Err(Error::Validation(_))));
        // round trip through the writer
        let back = maass_parse(&maass_write(&d)).unwrap();
        assert_eq!(back.lambda, d.lambda);
    }

    #[test]
    fn odd_form_orthogonal_to_even_product() {
        let u = maass_load(&data_dir().join("maass_odd_9.533695.txt"), &cfg()).unwrap();
        let t = eigenform_coefficients(12, 80).unwrap();
        let v = VProduct::new(&t, &t).unwrap();
        let ip = petersson_inner(&v, &u, &cfg()).unwrap();
        let scale = petersson_inner(&v, &v, &cfg()).unwrap().re.sqrt();
        assert!(ip.norm() < 1e-10 * scale, "{ip}");
    }
}
