//! Evaluation of holomorphic eigenforms from their coefficient tables.

use super::coeffs::{num_divisors, CoefficientTable};
use super::petersson::Automorphic;
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::util::sum::KahanC;
use crate::C64;
use std::f64::consts::PI;

/// Truncation point N* and certified tail bound T(N*) = Σ_{n>N*} d(n)n^{(k−1)/2+e}e^{−2πny}.
/// N* is the first n at which T(n) ≤ `target`; the bound uses d(n) ≤ 2√n and a
/// geometric majorant once the term ratio is below 1. The flag is false when the
/// table length is reached first.
fn truncation(k: u32, extra_exp: f64, y: f64, len: usize, target: f64) -> (usize, f64, bool) {
    let p = 0.5 * (k as f64 - 1.0) + extra_exp + 0.5;
    let term = |n: f64| 2.0 * (p * n.ln() - 2.0 * PI * n * y).exp();
    let mut n = 1usize;
    loop {
        let nf = (n + 1) as f64;
        let ratio = ((nf + 1.0) / nf).powf(p) * (-2.0 * PI * y).exp();
        if ratio < 1.0 {
            let tail = term(nf) / (1.0 - ratio);
            if tail <= target {
                return (n, tail, true);
            }
        }
        if n >= len {
            let tail = if ratio < 1.0 { term(nf) / (1.0 - ratio) } else { f64::INFINITY };
            return (n, tail, false);
        }
        n += 1;
    }
}

/// f(z) = Σ_{n≤N} a(n)e^{2πinz} with a certified truncation bound.
///
/// The tail Σ_{n>N}|a(n)|e^{−2πny} ≤ Σ d(n)n^{(k−1)/2}e^{−2πny} must stay below
/// rel_tol·|f(z)|; otherwise an accuracy error advises a larger table.
pub fn holo_eval(table: &CoefficientTable, z: C64, cfg: &PrecisionConfig) -> Result<C64> {
    if !(z.im > 0.0) {
        return Err(Error::domain(format!("holo_eval: Im z = {} must be positive", z.im)));
    }
    let k = table.weight;
    let y = z.im;
    let len = table.len_norm();
    let mut acc = KahanC::new();
    for n in 1..=len {
        let nf = n as f64;
        let mag = table.a_norm(n) * (0.5 * (k as f64 - 1.0) * nf.ln() - 2.0 * PI * nf * y).exp();
        acc.add(C64::from_polar(mag, 2.0 * PI * nf * z.re));
        if n % 4 == 0 && tail_after(k, y, n) <= 1e-3 * cfg.rel_tol * acc.value().norm() {
            return Ok(acc.value());
        }
    }
    let value = acc.value();
    let tail = tail_after(k, y, len);
    if !(tail <= cfg.rel_tol * value.norm()) {
        return Err(Error::accuracy(
            format!(
                "holo_eval: truncation at N = {len} leaves tail bound {tail:.3e} > rel_tol·|f| at Im z = {y}; use a larger table"
            ),
            tail / value.norm(),
        ));
    }
    Ok(value)
}

/// Σ_{n>N} d(n)n^{(k−1)/2}e^{−2πny} bounded by explicit terms plus a geometric majorant.
fn tail_after(k: u32, y: f64, nn: usize) -> f64 {
    let p = 0.5 * (k as f64 - 1.0);
    let mut acc = 0.0;
    let mut n = nn + 1;
    loop {
        let nf = n as f64;
        let t = num_divisors(n as u64) as f64 * (p * nf.ln() - 2.0 * PI * nf * y).exp();
        acc += t;
        let ratio = ((nf + 1.0) / nf).powf(p + 0.5) * (-2.0 * PI * y).exp();
        if ratio < 0.5 {
            // d(m) ≤ 2√m and ratio bound for the rest
            let next = 2.0 * ((p + 0.5) * (nf + 1.0).ln() - 2.0 * PI * (nf + 1.0) * y).exp();
            return acc + next / (1.0 - ratio);
        }
        n += 1;
        if n > nn + 100_000 {
            return f64::INFINITY;
        }
    }
}

/// The weight-0-modulus function z ↦ y^{k/2}f(z), whose absolute value is Γ-invariant.
///
/// Truncation per row keeps the certified tail below 1e-17 of the leading scale.
#[derive(Clone, Copy)]
pub struct HoloForm<'a> {
    pub table: &'a CoefficientTable,
}

impl<'a> HoloForm<'a> {
    pub fn new(table: &'a CoefficientTable) -> Self {
        Self { table }
    }

    /// Radial factors A(n)n^{(k−1)/2}y^{k/2}e^{−2πny}, n = 1..N*.
    fn radial(&self, y: f64) -> Result<Vec<f64>> {
        let k = self.table.weight as f64;
        // tail relative to the largest radial term
        let lead = (0.5 * k * y.ln() - 2.0 * PI * y).exp();
        let peak = {
            // max over n of n^{(k−1)/2}e^{−2πny}, attained near n = (k−1)/(4πy)
            let nopt = ((k - 1.0) / (4.0 * PI * y)).max(1.0);
            (0.5 * (k - 1.0) * nopt.ln() - 2.0 * PI * nopt * y).exp() * y.powf(0.5 * k)
        };
        let scale = lead.max(peak);
        let (nstar, tail, ok) = truncation(self.table.weight, 0.0, y, self.table.len_norm(), 1e-17 * scale / y.powf(0.5 * k));
        if !ok {
            return Err(Error::accuracy(
                format!("HoloForm: table of length {} too short at y = {y} (tail bound {tail:.3e})", self.table.len_norm()),
                tail,
            ));
        }
        Ok((1..=nstar)
            .map(|n| {
                let nf = n as f64;
                self.table.a_norm(n) * (0.5 * (k - 1.0) * nf.ln() + 0.5 * k * y.ln() - 2.0 * PI * nf * y).exp()
            })
            .collect())
    }
}

/// Σ_n r_n e^{2πinx} for each x, via a running rotation.
pub(crate) fn fourier_row(radial: &[C64], offset: usize, xs: &[f64]) -> Vec<C64> {
    xs.iter()
        .map(|&x| {
            let step = C64::from_polar(1.0, 2.0 * PI * x);
            let mut rot = C64::from_polar(1.0, 2.0 * PI * x * offset as f64);
            let mut acc = KahanC::new();
            for (j, r) in radial.iter().enumerate() {
                if j % 32 == 0 {
                    // refresh to avoid drift of the running rotation
                    rot = C64::from_polar(1.0, 2.0 * PI * x * (offset + j) as f64);
                }
                acc.add(r * rot);
                rot *= step;
            }
            acc.value()
        })
        .collect()
}

impl Automorphic for HoloForm<'_> {
    fn eval_row(&self, y: f64, xs: &[f64]) -> Result<Vec<C64>> {
        let r: Vec<C64> = self.radial(y)?.into_iter().map(|v| C64::new(v, 0.0)).collect();
        Ok(fourier_row(&r, 1, xs))
    }
}

/// V_{f₁,f₂}(z) = y^k f₁(z)·conj(f₂(z)), a Γ-invariant function decaying like e^{−4πy}.
pub struct VProduct<'a> {
    pub f1: HoloForm<'a>,
    pub f2: HoloForm<'a>,
}

impl<'a> VProduct<'a> {
    pub fn new(f1: &'a CoefficientTable, f2: &'a CoefficientTable) -> Result<Self> {
        if f1.weight != f2.weight {
            return Err(Error::domain("V_{f1,f2}: forms must have equal weight"));
        }
        Ok(Self { f1: HoloForm::new(f1), f2: HoloForm::new(f2) })
    }
}

impl Automorphic for VProduct<'_> {
    fn eval_row(&self, y: f64, xs: &[f64]) -> Result<Vec<C64>> {
        let a = self.f1.eval_row(y, xs)?;
        let b = self.f2.eval_row(y, xs)?;
        Ok(a.iter().zip(b.iter()).map(|(p, q)| p * q.conj()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::coeffs::eigenform_coefficients;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn cusp_dominance() {
        let t = eigenform_coefficients(12, 60).unwrap();
        let y = 5.0;
        let v = holo_eval(&t, C64::new(0.0, y), &cfg()).unwrap();
        let lead = (-2.0 * PI * y).exp();
        assert!(((v.re - lead) / lead).abs() < 1e-10);
    }

    #[test]
    fn modularity() {
        let t = eigenform_coefficients(12, 60).unwrap();
        let z = C64::new(0.1, 1.2);
        let lhs = holo_eval(&t, -z.inv(), &cfg()).unwrap();
        let rhs = z.powi(12) * holo_eval(&t, z, &cfg()).unwrap();
        assert!((lhs - rhs).norm() / rhs.norm() < 1e-8, "{lhs} {rhs}");
        for k in [16u32, 18, 20, 22, 26] {
            let t = eigenform_coefficients(k, 80).unwrap();
            let lhs = holo_eval(&t, -z.inv(), &cfg()).unwrap();
            let rhs = z.powi(k as i32) * holo_eval(&t, z, &cfg()).unwrap();
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn periodicity_and_short_table() {
        let t = eigenform_coefficients(12, 60).unwrap();
        let z = C64::new(0.37, 0.9);
        let a = holo_eval(&t, z, &cfg()).unwrap();
        let b = holo_eval(&t, z + 1.0, &cfg()).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm());
        let short = eigenform_coefficients(12, 3).unwrap();
        assert!(matches!(holo_eval(&short, C64::new(0.0, 0.3), &cfg()), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn row_matches_pointwise() {
        let t = eigenform_coefficients(12, 60).unwrap();
        let h = HoloForm::new(&t);
        let y: f64 = 0.9;
        let xs = [-0.4, 0.0, 0.13, 0.5];
        let row = h.eval_row(y, &xs).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let direct = holo_eval(&t, C64::new(x, y), &cfg()).unwrap() * y.powi(6);
            assert!((row[i] - direct).norm() < 1e-12 * direct.norm().max(1e-300) + 1e-300);
        }
        // |y^{k/2} f| is SL2(Z)-invariant
        let z = C64::new(0.21, 0.95);
        let w = -z.inv();
        let a = h.eval(z).unwrap().norm();
        let b = h.eval(w).unwrap().norm();
        assert!((a - b).abs() < 1e-10 * a);
    }
}
