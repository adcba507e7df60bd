//! Convergent-region identities of Chapter 3: the beta contour (Eq. 3.1.33), the
//! finite-shift contour representation (Eq. 3.1.38), and the rearrangements of
//! Z⁺ into S₁, …, S₈ (Eq. 3.2.3–3.2.21).
//!
//! The identities are exact for any finite coefficient data. Each check therefore uses
//! one common index set on both sides, so only quadrature and rounding error
//! separate them.

use crate::error::{Error, Result};
use crate::modforms::{CoefficientTable, MaassFormData};
use crate::precision::PrecisionConfig;
use crate::specfun::gamma::ln_gamma_mod;
use crate::util::quad::trapezoid_doubling;
use crate::util::sum::{kahan_sum_c, par_sum_c, KahanC};
use crate::C64;
use std::f64::consts::PI;

/// Both sides of Eq. 3.1.33:
/// (1/2πi)∫_{(−γ)} Γ(−z)Γ(β+z)x^z dz = Γ(β)(1+x)^{−β}, for 0 < γ < Re β and x > 0.
pub fn beta_contour_check(beta: C64, x: f64, gamma: f64, cfg: &PrecisionConfig) -> Result<(C64, C64)> {
    if !(gamma > 0.0 && gamma < beta.re && x > 0.0) {
        return Err(Error::domain(format!("beta_contour_check: need 0 < γ < Re β and x > 0 (γ = {gamma}, β = {beta}, x = {x})")));
    }
    let lx = x.ln();
    let f = |v: f64| {
        let z = C64::new(-gamma, v);
        (ln_gamma_mod(-z) + ln_gamma_mod(beta + z) + z * lx).exp()
    };
    let height = cfg.contour_height + beta.im.abs() + 20.0;
    let lhs = trapezoid_doubling(f, -height, height, (16.0 * height) as usize, cfg.rel_tol.max(1e-15), 0.0, 12)? / (2.0 * PI);
    let rhs = (ln_gamma_mod(beta) - beta * (1.0 + x).ln()).exp();
    Ok((lhs, rhs))
}

/// Partial sum Σ_{j<J} C(β+j−1, j) q^j of the binomial series (Eq. 3.2.9) of (1−q)^{−β}.
pub fn binomial_partial_sum(beta: C64, q: f64, terms: usize) -> C64 {
    let mut c = C64::new(1.0, 0.0);
    let mut acc = KahanC::new();
    for j in 0..terms {
        acc.add(c);
        c *= (beta + j as f64) / (j as f64 + 1.0) * q;
    }
    acc.value()
}

/// Both sides of Eq. 3.1.38 on the index set m ≤ N, h' = h − m ≤ N:
///
/// * left  = Σ a(h−m)λ(m)/(m^{s+(k−1)/2}h^{w+(k−1)/2});
/// * right = (1/2πiΓ(β))∫_{(−ε)}Γ(−z)Γ(β+z)L_N(w+z, f)L_N(s−z+(k−1)/2, μ̄)dz, with
///   β = w+(k−1)/2 and the L-functions replaced by their partial sums over n ≤ N.
///
/// The partial sums make the identity exact, and both sides also converge to the
/// untruncated values as N grows.
pub fn finite_shift_contour_check(
    f: &CoefficientTable,
    maass: &MaassFormData,
    s: C64,
    w: C64,
    eps_line: f64,
    n: usize,
    cfg: &PrecisionConfig,
) -> Result<(C64, C64)> {
    let k = f.weight as f64;
    let half = 0.5 * (k - 1.0);
    if !(w.re - eps_line > 1.0 && s.re + eps_line + half > 1.0 && eps_line > 0.0) {
        return Err(Error::domain(format!(
            "finite_shift_contour_check: need Re w − ε > 1 and Re s + ε + (k−1)/2 > 1 (s = {s}, w = {w}, ε = {eps_line})"
        )));
    }
    if f.len_norm() < n || maass.lambda.len() < n {
        return Err(Error::domain(format!("finite_shift_contour_check: tables shorter than N = {n}")));
    }
    let beta = w + half;
    // left: m ≤ N, j = h − m ∈ [1, N]; a(j) = A(j)j^{(k−1)/2}
    let left = par_sum_c(1, n + 1, |m| {
        let mf = m as f64;
        let lam = maass.lambda_at(m);
        let mut row = KahanC::new();
        for j in 1..=n {
            let hf = (m + j) as f64;
            let jf = j as f64;
            row.add((half * jf.ln() - beta * hf.ln()).exp() * f.a_norm(j));
        }
        row.value() * lam * (-(s + half) * mf.ln()).exp()
    });
    let logs: Vec<f64> = (1..=n).map(|i| (i as f64).ln()).collect();
    let lf = |z: C64| -> C64 {
        // Σ A(j) j^{−(w+z)}
        kahan_sum_c(&(1..=n).map(|j| (-(w + z) * logs[j - 1]).exp() * f.a_norm(j)).collect::<Vec<_>>())
    };
    let lm = |z: C64| -> C64 { kahan_sum_c(&(1..=n).map(|m| (-(s - z + half) * logs[m - 1]).exp() * maass.lambda_at(m)).collect::<Vec<_>>()) };
    let integrand = |v: f64| {
        let z = C64::new(-eps_line, v);
        (ln_gamma_mod(-z) + ln_gamma_mod(beta + z)).exp() * lf(z) * lm(z)
    };
    let height = cfg.contour_height + beta.im.abs() + s.im.abs() + 10.0;
    let tol = cfg.rel_tol.max(1e-14);
    let integral = trapezoid_doubling(integrand, -height, height, (8.0 * height) as usize, tol, 0.0, 14)?;
    let right = integral / (2.0 * PI) * (-ln_gamma_mod(beta)).exp();
    Ok((left, right))
}

/// The decompositions of Prop 3.2.1 on the index set m ≤ N, n = m + h ≤ 2N.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RearrangementReport {
    pub s1: C64,
    pub s2: C64,
    /// S₃^K + S₄^K (Eq. 3.2.10), S₄^K from the binomial tails.
    pub s3k: C64,
    pub s4k: C64,
    /// For each j ≤ K: (S₃ direct, S₅, S₆, S₇, S₈).
    pub s3_parts: Vec<[C64; 5]>,
    /// S₈ at j = 0 by the Euler product of local factors (Hecke multiplicativity).
    pub s8_euler: C64,
    /// Worst relative residual over all decompositions.
    pub max_residual: f64,
    /// Z⁺ = S₁ + S₂ on the same index set, as a direct loop.
    pub z_direct: C64,
}

/// Computes S₁ and S₂ directly (Eq. 3.2.4/3.2.5) and regroups S₂ as S₃^K + S₄^K
/// (Eq. 3.2.9–3.2.12). For each j ≤ K, S₃(s, w, j) is split as S₅ − S₆ − S₇ − S₈
/// (Eq. 3.2.17–3.2.21), with S₅ a product of two L partial sums.
///
/// All sums run over m ≤ N and n = m + h ≤ 2N with normalized A(n). The residual is
/// the worst relative mismatch over Z = S₁ + S₂, S₂ = S₃^K + S₄^K, every S₃ split,
/// and S₈ (direct vs Euler product).
pub fn rearrangement_check(
    f: &CoefficientTable,
    maass: &MaassFormData,
    s: C64,
    w: C64,
    kk: usize,
    n: usize,
    cfg: &PrecisionConfig,
) -> Result<RearrangementReport> {
    let k = f.weight as f64;
    let half = 0.5 * (k - 1.0);
    if !(s.re + half - kk as f64 > 1.0 && w.re > 1.0) {
        return Err(Error::domain(format!(
            "rearrangement_check: need Re s + (k−1)/2 − K > 1 and Re w > 1 (s = {s}, w = {w}, K = {kk})"
        )));
    }
    if f.len_norm() < 2 * n || maass.lambda.len() < n {
        return Err(Error::domain(format!("rearrangement_check: need A(n) for n ≤ 2N = {} and λ(m) for m ≤ N", 2 * n)));
    }
    let nn = 2 * n;
    let lnv: Vec<f64> = (0..=nn).map(|i| if i == 0 { 0.0 } else { (i as f64).ln() }).collect();
    let lam = |m: usize| maass.lambda_at(m);
    let a = |i: usize| f.a_norm(i);
    let beta = w + half;
    // S1 (h ≤ m) and S2 (h > m) with raw a(m+h) = A(m+h)(m+h)^{(k−1)/2}; h ≤ 2N − m
    let (s1, s2) = {
        let parts: Vec<(C64, C64)> = crate::util::sum::par_map(1, n + 1, |m| {
            let ms = (-(s + half) * lnv[m]).exp() * lam(m);
            let (mut p1, mut p2) = (KahanC::new(), KahanC::new());
            for h in 1..=(nn - m) {
                let t = (half * lnv[m + h] - beta * lnv[h]).exp() * a(m + h);
                if h <= m {
                    p1.add(t);
                } else {
                    p2.add(t);
                }
            }
            (p1.value() * ms, p2.value() * ms)
        });
        (kahan_sum_c(&parts.iter().map(|p| p.0).collect::<Vec<_>>()), kahan_sum_c(&parts.iter().map(|p| p.1).collect::<Vec<_>>()))
    };
    let z_direct = {
        let mut acc = KahanC::new();
        for d in 2..=nn {
            let mut row = KahanC::new();
            for m in 1..=(d - 1).min(n) {
                let h = d - m;
                row.add((-(s + half) * lnv[m] - beta * lnv[h]).exp() * lam(m));
            }
            acc.add(row.value() * (half * lnv[d]).exp() * a(d));
        }
        acc.value()
    };
    // S3^K and S4^K: per (m, h) with m < h, q = m/(m+h) < ½
    let s3_of = |j: usize| -> C64 {
        let jf = j as f64;
        par_sum_c(1, n + 1, |m| {
            let mut row = KahanC::new();
            for h in (m + 1)..=(nn - m) {
                row.add((-(w + jf) * lnv[m + h]).exp() * a(m + h));
            }
            row.value() * lam(m) * (-(s + half - jf) * lnv[m]).exp()
        })
    };
    let binom = |j: usize| -> C64 {
        let mut c = C64::new(1.0, 0.0);
        for i in 0..j {
            c *= (beta + i as f64) / (i as f64 + 1.0);
        }
        c
    };
    let mut s3k = C64::new(0.0, 0.0);
    let mut s3_direct = Vec::new();
    for j in 0..=kk {
        let v = s3_of(j);
        s3_direct.push(v);
        s3k += binom(j) * v;
    }
    let s4k = par_sum_c(1, n + 1, |m| {
        let mut row = KahanC::new();
        for h in (m + 1)..=(nn - m) {
            let q = m as f64 / (m + h) as f64;
            // Σ_{j>K} C(β+j−1, j) q^j by direct summation until negligible
            let mut c = binom(kk + 1) * q.powi(kk as i32 + 1);
            let mut tail = KahanC::new();
            let mut j = kk + 1;
            loop {
                tail.add(c);
                c *= (beta + j as f64) / (j as f64 + 1.0) * q;
                j += 1;
                if c.norm() < 1e-18 * tail.value().norm() || j > 4000 {
                    break;
                }
            }
            // m^{−(s+(k−1)/2)}(m+h)^{−w}·a(m+h)/(m+h)^{(k−1)/2}·Σ_j …, cf. Eq. 3.2.12
            row.add(tail.value() * (-w * lnv[m + h]).exp() * a(m + h));
        }
        row.value() * lam(m) * (-(s + half) * lnv[m]).exp()
    });
    // S3(j) = S5 − S6 − S7 − S8 on the set {m ≤ N, n ≤ 2N}
    let mut s3_parts = Vec::new();
    let mut worst: f64 = 0.0;
    let rel = |a: C64, b: C64| (a - b).norm() / b.norm().max(1e-300);
    for j in 0..=kk {
        let jf = j as f64;
        let alpha = s + half - jf;
        let la = kahan_sum_c(&(1..=n).map(|m| (-alpha * lnv[m]).exp() * lam(m)).collect::<Vec<_>>());
        let lf = kahan_sum_c(&(1..=nn).map(|i| (-(w + jf) * lnv[i]).exp() * a(i)).collect::<Vec<_>>());
        let s5 = la * lf;
        let piece = |range: &(dyn Fn(usize) -> (usize, usize) + Sync)| -> C64 {
            par_sum_c(1, n + 1, |m| {
                let (lo, hi) = range(m);
                let mut row = KahanC::new();
                for i in lo..=hi {
                    row.add((-(w + jf) * lnv[i]).exp() * a(i));
                }
                row.value() * lam(m) * (-alpha * lnv[m]).exp()
            })
        };
        let s6 = piece(&|m| (m + 1, (2 * m).min(nn)));
        let s7 = piece(&|m| (1, m - 1));
        let s8 = piece(&|m| (m, m));
        let s3 = s3_direct[j];
        worst = worst.max(rel(s5 - s6 - s7 - s8, s3));
        s3_parts.push([s3, s5, s6, s7, s8]);
    }
    let s8_euler = s8_euler_product(f, maass, s + w + half, n);
    worst = worst.max(rel(s8_euler, s3_parts[0][4]));
    worst = worst.max(rel(s3k + s4k, s2));
    worst = worst.max(rel(s1 + s2, z_direct));
    let _ = cfg;
    Ok(RearrangementReport { s1, s2, s3k, s4k, s3_parts, s8_euler, max_residual: worst, z_direct })
}

/// Σ_{m≤N} A(m)λ(m)m^{−x} as Π_{p≤N} Σ_{p^a≤N} A(p^a)λ(p^a)p^{−ax}. Every m ≤ N then
/// appears exactly once, plus products of prime powers exceeding N; those extra terms
/// are O(N^{−Re x}) and negligible at the large exponents used here.
fn s8_euler_product(f: &CoefficientTable, maass: &MaassFormData, x: C64, n: usize) -> C64 {
    let mut sieve = vec![true; n + 1];
    let mut prod = C64::new(1.0, 0.0);
    for p in 2..=n {
        if !sieve[p] {
            continue;
        }
        let mut q = p * p;
        while q <= n {
            sieve[q] = false;
            q += p;
        }
        let mut local = C64::new(1.0, 0.0);
        let mut pa = p;
        while pa <= n {
            local += (-x * (pa as f64).ln()).exp() * (f.a_norm(pa) * maass.lambda_at(pa));
            match pa.checked_mul(p) {
                Some(v) => pa = v,
                None => break,
            }
        }
        prod *= local;
    }
    prod
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::eigenform_coefficients;
    use crate::shifted_sums::tests::first_maass;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn beta_identity() {
        for (b, x) in [(C64::new(6.5, 0.0), 0.3), (C64::new(8.5, 1.2), 2.0), (C64::new(3.0, -0.4), 1.0)] {
            let (l, r) = beta_contour_check(b, x, 0.4, &cfg()).unwrap();
            assert!((l - r).norm() <= 1e-10 * r.norm(), "{l} vs {r}");
        }
        assert!(beta_contour_check(C64::new(1.0, 0.0), 1.0, 1.5, &cfg()).is_err());
    }

    #[test]
    fn binomial_scalar() {
        let beta = C64::new(2.0 + 5.5, 0.0);
        let q = 1.0 / 3.0;
        let v = binomial_partial_sum(beta, q, 200);
        let exact = (-beta * (1.0 - q).ln()).exp();
        assert!((v - exact).norm() < 1e-12 * exact.norm());
    }

    #[test]
    fn finite_shift_contour() {
        let t = eigenform_coefficients(12, 2200).unwrap();
        let u = first_maass();
        let (l, r) = finite_shift_contour_check(&t, &u, C64::new(3.0, 0.0), C64::new(3.0, 0.0), 0.25, 400, &cfg()).unwrap();
        assert!((l - r).norm() <= 1e-6 * l.norm(), "{l} vs {r}");
        assert!(finite_shift_contour_check(&t, &u, C64::new(3.0, 0.0), C64::new(1.1, 0.0), 0.25, 400, &cfg()).is_err());
    }

    #[test]
    fn rearrangements() {
        let t = eigenform_coefficients(12, 1200).unwrap();
        let u = first_maass();
        let rep = rearrangement_check(&t, &u, C64::new(9.0, 0.0), C64::new(2.0, 0.0), 2, 600, &cfg()).unwrap();
        assert!(rep.max_residual <= 1e-8, "{rep:?}");
        assert!(rearrangement_check(&t, &u, C64::new(-4.0, 0.0), C64::new(2.0, 0.0), 2, 100, &cfg()).is_err());
    }
}
