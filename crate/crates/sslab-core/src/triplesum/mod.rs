//! The smoothed triple shifted sum of Theorem 5.3.1 (Eq. 5.3.1):
//!
//! S±(X) = Σ A₁(m−h)·conj(A₂(m))·A₃(h±n)·(1−h/m)^{k/2}(1±n/h)^{k/2}·e^{−(m+h+n)/X}/√((m−h)·m·(h±n)),
//!
//! over m > h ≥ 1, n ≥ 1, with n < h for the − sign. This module provides:
//!
//! * a fast h-factored evaluator, [`smoothed_triple_sum`];
//! * the literal triple loop, [`smoothed_triple_sum_bruteforce`];
//! * the truncated triple Dirichlet series T± of Eq. 5.2.1, [`triple_dirichlet`];
//! * the decay fit for ladders of X, [`asymptotic_fit`].
//!
//! # Index set
//!
//! The (m, h) pair is cut at m + h ≤ L = ⌈X·ln(1/tail_eps)⌉, i.e. at e^{−(m+h)/X} < tail_eps.
//! The inner n-sum is not cut at L. For sign − the range n < h is already finite. For
//! sign + the weight (1+n/h)^{k/2} grows like n^{k/2}, so a cut at e^{−n/X} < tail_eps would
//! drop terms of size L^{k/2}·tail_eps. The n-range is therefore extended until the
//! envelope (1+n/h)^{k/2}·e^{−n/X} falls below tail_eps.
//!
//! # The inner sums
//!
//! In raw coefficients a(N) = A(N)N^{(k−1)/2}, the inner factors are
//!
//! * g⁺(h) = h^{−k/2}e^{h/X}·Σ_{N>h} a(N)e^{−N/X};
//! * g⁻(h) = h^{−k/2}·Σ_{N<h} a(N)e^{−(h−N)/X}.
//!
//! The tail Σ_{N>h} a(N)e^{−N/X} is tiny compared with its terms when h is small. For
//! genuine level-one cusp forms it is evaluated through modularity, using
//! f(i/2πX) = (−1)^{k/2}(2πX)^k f(2πiX): the tail equals F − Σ_{N≤h}, with F exponentially
//! small. That holds for h ≤ kX/2, which is past the peak of |a(N)|e^{−N/X}. Above that
//! point the tail comes from backward recursion, where it is stable. Synthetic tables
//! (no modularity) always use backward recursion. g⁻ uses the forward recursion
//! R(h+1) = (R(h) + a(h))e^{−1/X}.
//!
//! All loops are deterministic. Each row sum is sequential, and rows are combined by
//! pairwise summation in index order, so results are bitwise independent of the
//! thread count.

use crate::error::{Error, Result};
use crate::modforms::CoefficientTable;
use crate::util::sum::{kahan_sum_c, pairwise_sum, pairwise_sum_c, par_map, Kahan, KahanC};
use crate::C64;
use std::f64::consts::PI;

/// Sign of the inner shift h ± n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            _ => Err(Error::domain(format!("sign must be plus or minus (got {s:?})"))),
        }
    }
}

/// Default truncation threshold.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;
/// Cost guard of the brute-force oracle.
pub const BRUTE_MAX: usize = 2000;

/// Parameters of S±(X).
#[derive(Debug, Clone, Copy)]
pub struct TripleSumSpec<'a> {
    pub sign: Sign,
    pub forms: (&'a CoefficientTable, &'a CoefficientTable, &'a CoefficientTable),
    pub x: f64,
    pub tail_eps: f64,
}

impl<'a> TripleSumSpec<'a> {
    pub fn new(sign: Sign, f: &'a CoefficientTable, x: f64) -> Self {
        Self { sign, forms: (f, f, f), x, tail_eps: DEFAULT_TAIL_EPS }
    }

    /// L = ⌈X·ln(1/tail_eps)⌉, the cut on m + h.
    pub fn m_max(&self) -> usize {
        (self.x * (1.0 / self.tail_eps).ln()).ceil() as usize
    }

    fn check(&self) -> Result<u32> {
        let (f1, f2, f3) = self.forms;
        if !(f1.weight == f2.weight && f2.weight == f3.weight) {
            return Err(Error::domain("triple sum: forms must share the weight"));
        }
        if !(self.x >= 1.0 && self.x.is_finite()) {
            return Err(Error::domain(format!("triple sum: X = {} must be ≥ 1", self.x)));
        }
        if !(self.tail_eps > 0.0 && self.tail_eps <= 1e-6) {
            return Err(Error::domain(format!("triple sum: tail_eps = {} must lie in (0, 1e-6]", self.tail_eps)));
        }
        Ok(f1.weight)
    }

    /// Last n kept for sign + at shift h: past the maximum of (1+n/h)^{k/2}e^{−n/X},
    /// the first n where it drops below tail_eps.
    pub fn n_ext(&self, h: usize) -> usize {
        let k2 = 0.5 * self.forms.0.weight as f64;
        let hf = h as f64;
        let env = |n: f64| k2 * (1.0 + n / hf).ln() - n / self.x;
        let peak = (k2 * self.x - hf).max(0.0);
        let target = self.tail_eps.ln();
        // env is concave; beyond `peak` it is decreasing: bisect for env = target
        let (mut lo, mut hi) = (peak, peak + self.x);
        while env(hi) > target {
            hi = peak + 2.0 * (hi - peak);
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if env(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.ceil() as usize
    }

    /// Largest coefficient index the evaluation needs.
    pub fn required_len(&self) -> usize {
        let l = self.m_max();
        match self.sign {
            Sign::Minus => l,
            Sign::Plus => (1..l).map(|h| h + self.n_ext(h)).max().unwrap_or(1).max(l),
        }
    }
}

fn raw_from_norm(f: &CoefficientTable, n: usize) -> Vec<f64> {
    let e = 0.5 * (f.weight as f64 - 1.0);
    (0..=n).map(|i| if i == 0 { 0.0 } else { f.a_norm(i) * (i as f64).powf(e) }).collect()
}

/// g±(h) for 1 ≤ h < L (index 0 unused), computed as described in the module docs.
fn inner_factors(spec: &TripleSumSpec) -> Result<Vec<f64>> {
    let f3 = spec.forms.2;
    let k = f3.weight as f64;
    let l = spec.m_max();
    let x = spec.x;
    let mut g = vec![0.0; l + 1];
    match spec.sign {
        Sign::Minus => {
            let a = raw_from_norm(f3, l);
            let q = (-1.0 / x).exp();
            let mut r = 0.0;
            for h in 1..=l {
                g[h] = r * (h as f64).powf(-0.5 * k);
                r = (r + a[h]) * q;
            }
        }
        Sign::Plus => {
            let top = spec.required_len();
            let a = raw_from_norm(f3, top);
            let w = |n: usize| a[n] * (-(n as f64) / x).exp();
            // backward: tail(h) = Σ_{h<N≤top} a(N)e^{−N/X}
            let mut tail = vec![0.0; l + 1];
            let mut acc = Kahan::new();
            for nn in (l + 1..=top).rev() {
                acc.add(w(nn));
            }
            for h in (1..=l).rev() {
                tail[h] = acc.value();
                acc.add(w(h));
            }
            let modular = f3.raw.len() >= 3 && f3.weight % 2 == 0;
            if modular {
                let xf = 2.0 * PI * x;
                let sign = if (f3.weight / 2) % 2 == 0 { 1.0 } else { -1.0 };
                let mut fsum = Kahan::new();
                for nn in 1..=3usize {
                    fsum.add(a[nn] * (-4.0 * PI * PI * x * nn as f64).exp());
                }
                let big_f = sign * (k * xf.ln()).exp() * fsum.value();
                let switch = ((0.5 * k * x).floor() as usize).min(l);
                let mut part = Kahan::new();
                for (h, t) in tail.iter_mut().enumerate().take(switch + 1).skip(1) {
                    part.add(w(h));
                    *t = big_f - part.value();
                }
            }
            for h in 1..l {
                let hf = h as f64;
                g[h] = (-0.5 * k * hf.ln() + hf / x).exp() * tail[h];
            }
        }
    }
    Ok(g)
}

fn check_tables(spec: &TripleSumSpec) -> Result<()> {
    let (f1, f2, f3) = spec.forms;
    let l = spec.m_max();
    let need3 = spec.required_len();
    if f1.len_norm() < l || f2.len_norm() < l || f3.len_norm() < need3 {
        return Err(Error::domain(format!(
            "triple sum: tables too short (need f₁, f₂ to {l} and f₃ to {need3}; have {}, {}, {})",
            f1.len_norm(),
            f2.len_norm(),
            f3.len_norm()
        )));
    }
    Ok(())
}

/// Row factor Σ_{h<m≤L−h} A₁(m−h)A₂(m)(1−h/m)^{k/2}e^{−m/X}/√((m−h)m).
fn row(spec: &TripleSumSpec, h: usize) -> f64 {
    let (f1, f2, _) = spec.forms;
    let k2 = 0.5 * f1.weight as f64;
    let l = spec.m_max();
    let hf = h as f64;
    let mut acc = Kahan::new();
    for m in (h + 1)..=(l - h) {
        let mf = m as f64;
        let d = (m - h) as f64;
        acc.add(f1.a_norm(m - h) * f2.a_norm(m) * (k2 * (d / mf).ln() - mf / spec.x).exp() / (d * mf).sqrt());
    }
    acc.value() * (-hf / spec.x).exp()
}

/// Fast h-factored evaluation of S±(X); cost O(L²).
pub fn smoothed_triple_sum(spec: &TripleSumSpec) -> Result<f64> {
    spec.check()?;
    check_tables(spec)?;
    let g = inner_factors(spec)?;
    let l = spec.m_max();
    let hmax = l / 2;
    let terms: Vec<f64> = par_map(1, hmax + 1, |h| if g[h] == 0.0 { 0.0 } else { g[h] * row(spec, h) });
    Ok(pairwise_sum(&terms))
}

/// The literal triple loop over the same index set (cost guard L ≤ 2000).
pub fn smoothed_triple_sum_bruteforce(spec: &TripleSumSpec) -> Result<f64> {
    Ok(bruteforce_with_condition(spec)?.value)
}

/// Brute-force value together with Σ|terms|.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct BruteForce {
    pub value: f64,
    /// Σ|terms|. For sign + the inner n-sum cancels heavily, since g⁺(h) is far smaller
    /// than its terms. ε·abs_sum is therefore the attainable accuracy of *any*
    /// term-by-term binary64 evaluation, the oracle included.
    pub abs_sum: f64,
}

impl BruteForce {
    /// Agreement test for the factored value: relative 1e-11, or within 64ε·Σ|terms|
    /// when cancellation makes 1e-11 unattainable for the oracle itself.
    pub fn agrees(&self, other: f64) -> bool {
        let d = (self.value - other).abs();
        d <= 1e-11 * self.value.abs() || d <= 64.0 * f64::EPSILON * self.abs_sum
    }
}

/// [`smoothed_triple_sum_bruteforce`] with its conditioning.
pub fn bruteforce_with_condition(spec: &TripleSumSpec) -> Result<BruteForce> {
    spec.check()?;
    let l = spec.m_max();
    if l > BRUTE_MAX {
        return Err(Error::domain(format!("bruteforce: L = {l} exceeds the cost guard {BRUTE_MAX}")));
    }
    check_tables(spec)?;
    let (f1, f2, f3) = spec.forms;
    let k2 = 0.5 * f1.weight as f64;
    let x = spec.x;
    let terms: Vec<(f64, f64)> = par_map(1, l / 2 + 1, |h| {
        let hf = h as f64;
        let nmax = match spec.sign {
            Sign::Minus => h - 1,
            Sign::Plus => spec.n_ext(h),
        };
        let mut acc = Kahan::new();
        let mut abs = 0.0;
        for m in (h + 1)..=(l - h) {
            let mf = m as f64;
            let d = (m - h) as f64;
            let c1 = f1.a_norm(m - h) * f2.a_norm(m);
            if c1 == 0.0 {
                continue;
            }
            for n in 1..=nmax {
                let nf = n as f64;
                let j = match spec.sign {
                    Sign::Plus => h + n,
                    Sign::Minus => h - n,
                };
                debug_assert!(j >= 1);
                let jf = j as f64;
                let w = k2 * ((1.0 - hf / mf).ln() + (jf / hf).ln()) - (mf + hf + nf) / x;
                let t = c1 * f3.a_norm(j) * w.exp() / (d * mf * jf).sqrt();
                acc.add(t);
                abs += t.abs();
            }
        }
        (acc.value(), abs)
    });
    let value = pairwise_sum(&terms.iter().map(|t| t.0).collect::<Vec<_>>());
    let abs_sum = pairwise_sum(&terms.iter().map(|t| t.1).collect::<Vec<_>>());
    Ok(BruteForce { value, abs_sum })
}

/// Truncated T±(s₁, s₂, s₃) with a tail estimate.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TripleDirichletValue {
    pub value: C64,
    /// Same series summed in the order m → h → n (rows indexed by m).
    pub value_dual: C64,
    /// |T(N) − T(N/2)|, a heuristic tail estimate.
    pub tail_estimate: f64,
}

/// T±(s₁, s₂, s₃) of Eq. 5.2.1 (second line), truncated to m ≤ N and n ≤ N. Sign + needs
/// f₃ to 2N.
///
/// Preconditions, with margin 0.1: σ₁ > 1 − k/2, σ₂ > 3/2 − σ₁, σ₃ > 1.
pub fn triple_dirichlet(
    s1: C64,
    s2: C64,
    s3: C64,
    sign: Sign,
    forms: (&CoefficientTable, &CoefficientTable, &CoefficientTable),
    n: usize,
) -> Result<TripleDirichletValue> {
    let (f1, f2, f3) = forms;
    let k = f1.weight as f64;
    if !(f2.weight == f1.weight && f3.weight == f1.weight) {
        return Err(Error::domain("triple_dirichlet: forms must share the weight"));
    }
    if !(s1.re > 1.0 - 0.5 * k + 0.1 && s2.re > 1.5 - s1.re + 0.1 && s3.re > 1.1) {
        return Err(Error::domain(format!(
            "triple_dirichlet: (s₁, s₂, s₃) = ({s1}, {s2}, {s3}) outside σ₁ > 1 − k/2, σ₂ > 3/2 − σ₁, σ₃ > 1 (margin 0.1)"
        )));
    }
    let need3 = if sign == Sign::Plus { 2 * n } else { n };
    if f1.len_norm() < n || f2.len_norm() < n || f3.len_norm() < need3 || n < 4 {
        return Err(Error::domain(format!("triple_dirichlet: tables too short for N = {n}")));
    }
    let value = t_factored(s1, s2, s3, sign, forms, n);
    let half = t_factored(s1, s2, s3, sign, forms, n / 2);
    let value_dual = t_dual(s1, s2, s3, sign, forms, n);
    Ok(TripleDirichletValue { value, value_dual, tail_estimate: (value - half).norm() })
}

fn g_dirichlet(s3: C64, sign: Sign, f3: &CoefficientTable, h: usize, n: usize) -> C64 {
    let e = 0.5 * (f3.weight as f64 - 1.0);
    let hf = h as f64;
    let nmax = if sign == Sign::Minus { (h - 1).min(n) } else { n };
    let mut acc = KahanC::new();
    for j in 1..=nmax {
        let jf = j as f64;
        let (idx, ratio) = match sign {
            Sign::Plus => (h + j, 1.0 + jf / hf),
            Sign::Minus => (h - j, 1.0 - jf / hf),
        };
        acc.add((e * ratio.ln() - (s3 + e) * jf.ln()).exp() * f3.a_norm(idx));
    }
    acc.value()
}

fn t_factored(s1: C64, s2: C64, s3: C64, sign: Sign, forms: (&CoefficientTable, &CoefficientTable, &CoefficientTable), n: usize) -> C64 {
    let (f1, f2, f3) = forms;
    let k = f1.weight as f64;
    let e = 0.5 * (k - 1.0);
    let rows: Vec<C64> = par_map(1, n, |h| {
        let hf = h as f64;
        let mut acc = KahanC::new();
        for m in (h + 1)..=n {
            let mf = m as f64;
            acc.add((e * (1.0 - hf / mf).ln() - (s1 + 0.5 * k) * mf.ln()).exp() * (f1.a_norm(m - h) * f2.a_norm(m)));
        }
        acc.value() * (-(s2 + 0.5 - 0.5 * k) * hf.ln()).exp() * g_dirichlet(s3, sign, f3, h, n)
    });
    pairwise_sum_c(&rows)
}

fn t_dual(s1: C64, s2: C64, s3: C64, sign: Sign, forms: (&CoefficientTable, &CoefficientTable, &CoefficientTable), n: usize) -> C64 {
    let (f1, f2, f3) = forms;
    let k = f1.weight as f64;
    let e = 0.5 * (k - 1.0);
    // inner n-sums re-derived with the shifted index j = h ± n as the loop variable
    let g: Vec<C64> = par_map(0, n, |h| {
        if h == 0 {
            return C64::new(0.0, 0.0);
        }
        let hf = h as f64;
        let mut acc = KahanC::new();
        let (lo, hi) = match sign {
            Sign::Plus => (h + 1, h + n),
            Sign::Minus => (h.saturating_sub(n).max(1), h - 1),
        };
        for j in lo..=hi {
            let jf = j as f64;
            let nf = (j as f64 - hf).abs();
            acc.add((e * (jf / hf).ln() - (s3 + e) * nf.ln()).exp() * f3.a_norm(j));
        }
        acc.value() * (-(s2 + 0.5 - 0.5 * k) * hf.ln()).exp()
    });
    let rows: Vec<C64> = par_map(2, n + 1, |m| {
        let mf = m as f64;
        let mut acc = KahanC::new();
        for h in 1..m {
            let hf = h as f64;
            acc.add((e * (1.0 - hf / mf).ln()).exp() * (f1.a_norm(m - h) * f2.a_norm(m)) * g[h]);
        }
        acc.value() * (-(s1 + 0.5 * k) * mf.ln()).exp()
    });
    kahan_sum_c(&rows)
}

/// Fit of |S(2X) − S(X)| ∝ X^{slope} over a ladder.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct AsymptoticFit {
    /// S(X_max) + (S(X_max) − S(X_max/2))/(2^α − 1), with α = −slope.
    pub constant_estimate: f64,
    pub slope: f64,
    /// log|ΔS| − fitted line, per difference.
    pub residuals: Vec<f64>,
    /// The differences |S(X_{i+1}) − S(X_i)|, indexed by X_i.
    pub differences: Vec<(f64, f64)>,
}

/// Least-squares line through (log X_i, log|S(X_{i+1}) − S(X_i)|).
///
/// Needs ≥ 4 points with a common ratio X_{i+1}/X_i; the Richardson constant assumes
/// that ratio is 2, and uses the actual ratio otherwise.
pub fn asymptotic_fit(ladder: &[(f64, f64)]) -> Result<AsymptoticFit> {
    if ladder.len() < 4 {
        return Err(Error::domain(format!("asymptotic_fit: need ≥ 4 ladder points (got {})", ladder.len())));
    }
    let ratio = ladder[1].0 / ladder[0].0;
    if !(ratio > 1.0) || ladder.windows(2).any(|w| ((w[1].0 / w[0].0) / ratio - 1.0).abs() > 1e-9) {
        return Err(Error::domain("asymptotic_fit: ladder must be increasing and geometric"));
    }
    let mut pts = Vec::new();
    let mut differences = Vec::new();
    for w in ladder.windows(2) {
        let d = (w[1].1 - w[0].1).abs();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::domain(format!("asymptotic_fit: degenerate difference at X = {}", w[0].0)));
        }
        pts.push((w[0].0.ln(), d.ln()));
        differences.push((w[0].0, d));
    }
    let np = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / np;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / np;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residuals = pts.iter().map(|p| p.1 - (icpt + slope * p.0)).collect();
    let alpha = -slope;
    let n = ladder.len();
    let (s_top, s_prev) = (ladder[n - 1].1, ladder[n - 2].1);
    let constant_estimate = s_top + (s_top - s_prev) / (ratio.powf(alpha) - 1.0);
    Ok(AsymptoticFit { constant_estimate, slope, residuals, differences })
}

/// S(X) along a ladder with the default tail_eps. One table covers all rungs.
pub fn ladder(sign: Sign, f: &CoefficientTable, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    xs.iter().map(|&x| Ok((x, smoothed_triple_sum(&TripleSumSpec::new(sign, f, x))?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::eigenform_coefficients;
    use rand::{Rng, SeedableRng};

    fn delta(n: usize) -> CoefficientTable {
        eigenform_coefficients(12, n).unwrap()
    }

    #[test]
    fn factored_equals_bruteforce() {
        let f = delta(1200);
        for sign in [Sign::Plus, Sign::Minus] {
            for x in [1.0, 2.0, 4.0] {
                let spec = TripleSumSpec::new(sign, &f, x);
                let a = smoothed_triple_sum(&spec).unwrap();
                let b = bruteforce_with_condition(&spec).unwrap();
                assert!(b.agrees(a), "{sign:?} X={x}: {a} vs {b:?}");
            }
        }
    }

    #[test]
    fn random_tables_match_bruteforce() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..4 {
            let tab = |rng: &mut rand_chacha::ChaCha8Rng| CoefficientTable::synthetic(12, (0..800).map(|_| rng.gen_range(-2.0..2.0)).collect());
            let (f1, f2, f3) = (tab(&mut rng), tab(&mut rng), tab(&mut rng));
            let sign = if trial % 2 == 0 { Sign::Plus } else { Sign::Minus };
            let spec = TripleSumSpec { sign, forms: (&f1, &f2, &f3), x: 1.5, tail_eps: 1e-10 };
            let a = smoothed_triple_sum(&spec).unwrap();
            let b = smoothed_triple_sum_bruteforce(&spec).unwrap();
            assert!((a - b).abs() <= 1e-11 * b.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn trivial_cases() {
        let z = CoefficientTable::synthetic(12, vec![0.0; 800]);
        let spec = TripleSumSpec::new(Sign::Plus, &z, 2.0);
        assert_eq!(smoothed_triple_sum(&spec).unwrap(), 0.0);
        assert_eq!(smoothed_triple_sum_bruteforce(&spec).unwrap(), 0.0);
        // single A₃(2) = v with A₁ = A₂ = δ_{n,1}·…: only (m,h,n) = (2,1,1), sign +
        let mut one = vec![0.0; 800];
        one[0] = 1.0;
        one[1] = 1.0;
        let f12 = CoefficientTable::synthetic(12, one);
        let mut c3 = vec![0.0; 800];
        c3[1] = 0.7;
        let f3 = CoefficientTable::synthetic(12, c3);
        let x = 2.0;
        let spec = TripleSumSpec { sign: Sign::Plus, forms: (&f12, &f12, &f3), x, tail_eps: 1e-12 };
        // m − h = 1, m ∈ {2} (A₂(m) ≠ 0 only for m ≤ 2), h = 1, n = 1
        let hand = 1.0 * 1.0 * 0.7 * 0.5f64.powi(6) * 2.0f64.powi(6) * (-4.0 / x).exp() / (1.0f64 * 2.0 * 2.0).sqrt();
        let a = smoothed_triple_sum(&spec).unwrap();
        assert!((a - hand).abs() < 1e-15 * hand, "{a} vs {hand}");
        // sign −: the h = 1 row is empty
        let spec = TripleSumSpec { sign: Sign::Minus, forms: (&f12, &f12, &f3), x, tail_eps: 1e-12 };
        assert_eq!(smoothed_triple_sum(&spec).unwrap(), 0.0);
    }

    #[test]
    fn tail_eps_stability() {
        let f = delta(6000);
        for sign in [Sign::Plus, Sign::Minus] {
            let mut spec = TripleSumSpec::new(sign, &f, 16.0);
            let a = smoothed_triple_sum(&spec).unwrap();
            spec.tail_eps = 1e-10;
            let b = smoothed_triple_sum(&spec).unwrap();
            assert!((a - b).abs() < 1e-8 * a.abs(), "{sign:?}: {a} vs {b}");
        }
    }

    #[test]
    fn short_table_rejected() {
        let f = delta(100);
        assert!(smoothed_triple_sum(&TripleSumSpec::new(Sign::Plus, &f, 16.0)).is_err());
        assert!(smoothed_triple_sum_bruteforce(&TripleSumSpec::new(Sign::Plus, &f, 200.0)).is_err());
    }

    #[test]
    fn fits_on_synthetic_ladders() {
        let xs = [16.0, 32.0, 64.0, 128.0, 256.0];
        let l1: Vec<_> = xs.iter().map(|&x: &f64| (x, 7.0 + x.powf(-0.5))).collect();
        let fit = asymptotic_fit(&l1).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-10 && (fit.constant_estimate - 7.0).abs() < 1e-10, "{fit:?}");
        let l2: Vec<_> = xs.iter().map(|&x: &f64| (x, 3.0 + 2.0 / x)).collect();
        let fit = asymptotic_fit(&l2).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-10 && (fit.constant_estimate - 3.0).abs() < 1e-10);
        assert!(asymptotic_fit(&l1[..3]).is_err());
        assert!(asymptotic_fit(&[(1.0, 1.0), (2.0, 1.0), (4.0, 2.0), (8.0, 3.0)]).is_err());
    }

    #[test]
    fn triple_dirichlet_dual_nesting() {
        let f = delta(1600);
        for sign in [Sign::Plus, Sign::Minus] {
            let (s1, s2, s3) = (C64::new(-4.0, 0.3), C64::new(8.0, -0.2), C64::new(3.0, 0.1));
            let v = triple_dirichlet(s1, s2, s3, sign, (&f, &f, &f), 400).unwrap();
            let w = triple_dirichlet(s1, s2, s3, sign, (&f, &f, &f), 800).unwrap();
            eprintln!("{sign:?}: T(400) = {}, T(800) = {}, est {}", v.value, w.value, v.tail_estimate);
            assert!((w.value - v.value).norm() <= v.tail_estimate);
            assert!((v.value - v.value_dual).norm() <= 1e-10 * v.value.norm(), "{v:?}");
            let c = triple_dirichlet(s1.conj(), s2.conj(), s3.conj(), sign, (&f, &f, &f), 400).unwrap();
            assert!((c.value - v.value.conj()).norm() <= 1e-12 * v.value.norm());
            assert!(v.value.is_finite());
        }
        assert!(triple_dirichlet(C64::new(-5.0, 0.0), C64::new(8.0, 0.0), C64::new(3.0, 0.0), Sign::Plus, (&f, &f, &f), 100).is_err());
    }
}
