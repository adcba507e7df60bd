//! The M-function kernel
//!
//! ```text
//! M_{Y,h,k}(s, z/i, δ) = ∫_{2πh/Y}^{2πhY} y^{s−1} e^{y(1−δ)} W_{k/2,z}(2y) dy/y,
//! M_k(s, z/i, δ)       = the same integral over (0, ∞),
//! ```
//!
//! in four representations that check each other:
//!
//! * [`m_truncated_quadrature`]: direct quadrature of the truncated integral.
//! * [`m_closed`]: the ₂F₁ closed form (Eq. 2.2.28).
//! * [`m_contour`]: the Mellin–Barnes form (Eq. 2.2.32–2.2.35), with the residues of
//!   Γ(−u) at ℓ < A summed explicitly and the line Re u = A integrated. It is valid in
//!   the continued region.
//! * [`m_limit`]: the δ → 0 limit (Eq. 2.2.24, 2.4.15/2.4.16).
//!
//! The module also provides the exact residues in s and z ([`m_residue_s`],
//! [`m_residue_z`]), their δ → 0 leading terms, and the Lemma 2.2.5 inequality
//! ([`lemma225_gap`]).

pub mod grid;
mod residues;

pub use residues::{m_residue_s, m_residue_s_leading, m_residue_z, m_residue_z_leading, small_circle, standard_residue_checks, ResidueCheck, Sign};

use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::specfun::gamma::ln_gamma_mod;
use crate::specfun::mb::{GammaFactor, MbIntegral};
use crate::specfun::{gauss_2f1_regularized, rgamma, whittaker_w_scaled};
use crate::util::quad::adaptive_gk;
use crate::util::sum::{pairwise_sum_c, par_map};
use crate::C64;
use std::f64::consts::PI;

/// Pole-proximity guard in the (s, z) plane.
pub const EPS_POLE: f64 = 1e-3;

/// Truncation (Y, h) of Eq. 2.2.1.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Truncation {
    pub y_cut: f64,
    pub h: u64,
}

/// Parameters of M_{Y,h,k}(s, z/i, δ) / M_k(s, z/i, δ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MFunctionParams {
    pub k: f64,
    pub s: C64,
    pub z: C64,
    pub delta: f64,
    pub truncation: Option<Truncation>,
}

impl MFunctionParams {
    pub fn new(k: f64, s: C64, z: C64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("M-function: δ = {delta} must lie in (0, 1)")));
        }
        if !k.is_finite() || !s.re.is_finite() || !s.im.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::domain("M-function: non-finite parameter"));
        }
        Ok(Self { k, s, z, delta, truncation: None })
    }

    pub fn with_truncation(mut self, y_cut: f64, h: u64) -> Result<Self> {
        if !(y_cut >= 1.0) || h == 0 {
            return Err(Error::domain(format!("M-function truncation: need Y ≥ 1 and h ≥ 1 (got Y = {y_cut}, h = {h})")));
        }
        self.truncation = Some(Truncation { y_cut, h });
        Ok(self)
    }

    /// X = 2/δ − 1, the base of the Mellin–Barnes power.
    fn x_base(&self) -> f64 {
        2.0 / self.delta - 1.0
    }
}

/// Distance from w to the set ℤ_{≤0}.
fn dist_nonpos_int(w: C64) -> f64 {
    let n = w.re.round().min(0.0);
    (w - n).norm()
}

/// Guard against the polar lines s − ½ ± z ∈ ℤ_{≤0}.
fn polar_guard(s: C64, z: C64) -> Result<()> {
    for (sg, name) in [(1.0, "s − 1/2 + z"), (-1.0, "s − 1/2 − z")] {
        let w = s - 0.5 + z * sg;
        let d = dist_nonpos_int(w);
        if d < EPS_POLE {
            return Err(Error::domain(format!(
                "M-function: (s, z) = ({s}, {z}) is within {d:.1e} of the polar line {name} = {}",
                w.re.round().min(0.0)
            )));
        }
    }
    Ok(())
}

/// The truncated integral M_{Y,h,k} (Eq. 2.2.1) by adaptive Gauss–Kronrod quadrature.
///
/// The quadrature runs in t = ln y on panels of width ¼, using the scaled Whittaker
/// function e^{y}W_{k/2,z}(2y), so the integrand is y^{s−1}e^{−δy}·e^{y}W(2y).
pub fn m_truncated_quadrature(p: &MFunctionParams, cfg: &PrecisionConfig) -> Result<C64> {
    let tr = p.truncation.ok_or_else(|| Error::domain("m_truncated_quadrature: truncation (Y, h) required"))?;
    if tr.y_cut == 1.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let lo = (2.0 * PI * tr.h as f64 / tr.y_cut).ln();
    let hi = (2.0 * PI * tr.h as f64 * tr.y_cut).ln();
    let npanel = ((hi - lo) / 0.25).ceil().max(1.0) as usize;
    let width = (hi - lo) / npanel as f64;
    let kappa = 0.5 * p.k;
    let integrand = |t: f64| -> Result<C64> {
        let y = t.exp();
        let w = whittaker_w_scaled(kappa, p.z, 2.0 * y, cfg)?;
        Ok(((p.s - 1.0) * t - p.delta * y).exp() * w)
    };
    let tol = cfg.rel_tol.max(1e-15);
    // First pass: cheap 2-point-per-panel estimate to set an absolute scale.
    let rough: Vec<Result<C64>> = par_map(0, npanel, |i| integrand(lo + width * (i as f64 + 0.5)).map(|v| v * width));
    let rough: Vec<C64> = rough.into_iter().collect::<Result<_>>()?;
    let scale = rough.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let panels: Vec<Result<C64>> = par_map(0, npanel, |i| {
        let a = lo + width * i as f64;
        let mut err: Option<Error> = None;
        let r = adaptive_gk(
            |t| match integrand(t) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    C64::new(0.0, 0.0)
                }
            },
            a,
            a + width,
            1e-2 * tol * scale / npanel as f64,
            tol,
            200,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(r?.0)
    });
    let panels: Vec<C64> = panels.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum_c(&panels))
}

/// The closed form Eq. 2.2.28:
/// 2^{z+½}Γ(s−½+z)Γ(s−½−z)δ^{−(s−½+z)} · ₂F₁(s−½+z, z−k/2+½; s−k/2; 1−2/δ)/Γ(s−k/2).
///
/// The regularized ₂F₁/Γ(c) takes care of the Γ(s − k/2) poles.
pub fn m_closed(p: &MFunctionParams, cfg: &PrecisionConfig) -> Result<C64> {
    let a = p.s - 0.5 + p.z;
    let a2 = p.s - 0.5 - p.z;
    if !(a.re > 0.0 && a2.re > 0.0) {
        return Err(Error::domain(format!(
            "m_closed: requires Re(s − 1/2 ± z) > 0 (got {:.4}, {:.4}); use m_contour",
            a.re, a2.re
        )));
    }
    let b = p.z - 0.5 * p.k + 0.5;
    let c = p.s - 0.5 * p.k;
    let pre = (p.z + 0.5) * 2f64.ln() + ln_gamma_mod(a) + ln_gamma_mod(a2) - a * p.delta.ln();
    let f = gauss_2f1_regularized(a, b, c, 1.0 - 2.0 / p.delta, cfg)?;
    Ok(pre.exp() * f)
}

/// A default admissible shift A for [`m_contour`].
///
/// The shift lies just right of the rightmost left-family pole, at distance
/// min(0.3, gap/2) where gap is the distance to the next integer. This keeps the
/// explicit residue sum as short as possible and minimizes cancellation.
pub fn default_contour_shift(p: &MFunctionParams) -> f64 {
    let a = p.s - 0.5 + p.z;
    let b = p.z - 0.5 * p.k + 0.5;
    let l = (-a.re).max(-b.re);
    let m = l.floor() + 1.0;
    let gap = m - l;
    if gap >= 0.02 {
        l + (0.5 * gap).min(0.3)
    } else {
        m + 0.5
    }
}

/// Eq. 2.2.33–2.2.35: prefactor × [Σ_{0≤ℓ<A} R(s,z,ℓ) + (1/2πi)∫_{(A)} …].
///
/// `A` must place every pole of Γ(s−½+z+u)Γ(z−k/2+½+u) to the left of Re u = A,
/// and A must be at least [`EPS_POLE`] away from the integers (the poles of Γ(−u)).
/// The paper's stronger condition A > 1 + |Re s| + |Re z| + |k/2| is needed only for
/// its growth bounds. It is not enforced, because every R(ℓ) term adds a factor
/// (2/δ − 1) of cancellation.
pub fn m_contour(p: &MFunctionParams, a_shift: f64, cfg: &PrecisionConfig) -> Result<C64> {
    polar_guard(p.s, p.z)?;
    let a = p.s - 0.5 + p.z;
    let b = p.z - 0.5 * p.k + 0.5;
    let c = p.s - 0.5 * p.k;
    if dist_nonpos_int(b) < EPS_POLE {
        return Err(Error::domain(format!(
            "m_contour: z − k/2 + 1/2 = {b} is a pole of Γ; the contour of Eq. 2.2.32 is undefined"
        )));
    }
    let lmax = (-a.re).max(-b.re);
    if !(a_shift > lmax + EPS_POLE) {
        return Err(Error::domain(format!(
            "m_contour: A = {a_shift} must exceed the rightmost left pole {lmax:.4} by {EPS_POLE}"
        )));
    }
    if (a_shift - a_shift.round()).abs() < EPS_POLE {
        return Err(Error::domain(format!("m_contour: A = {a_shift} is integer-aligned (poles of Γ(−u))")));
    }
    let x = p.x_base();
    let lx = x.ln();
    let mut terms = Vec::new();
    let mut l = 0usize;
    while (l as f64) < a_shift {
        let lf = l as f64;
        let mut lnfact = 0.0;
        for j in 2..=l {
            lnfact += (j as f64).ln();
        }
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        let v = (ln_gamma_mod(a + lf) + ln_gamma_mod(b + lf) - lnfact + lf * lx).exp() * rgamma(c + lf) * sign;
        terms.push(v);
        l += 1;
    }
    let mb = MbIntegral::new(vec![GammaFactor::plus(a), GammaFactor::plus(b), GammaFactor::minus(C64::new(0.0, 0.0))], vec![GammaFactor::plus(c)], C64::new(lx, 0.0));
    terms.push(mb.line_only(a_shift, cfg)?);
    let n1 = pairwise_sum_c(&terms);
    let pre = (ln_gamma_mod(p.s - 0.5 - p.z) + (p.z + 0.5) * 2f64.ln() - ln_gamma_mod(b) - a * p.delta.ln()).exp();
    Ok(pre * n1)
}

/// δ → 0 limit (Eq. 2.2.24 main term; Eq. 2.4.15 for k = 0 and Eq. 2.4.16 for weight −k):
/// 2^{1−s}Γ(s−½−z)Γ(s−½+z)Γ(1−s−k/2)/(Γ(½−k/2+z)Γ(½−k/2−z)).
///
/// Precondition Re s < ½ − k/2.
pub fn m_limit(s: C64, z: C64, k: f64) -> Result<C64> {
    if !(s.re < 0.5 - 0.5 * k) {
        return Err(Error::domain(format!("m_limit: requires Re s < 1/2 − k/2 = {} (got {})", 0.5 - 0.5 * k, s.re)));
    }
    polar_guard(s, z)?;
    let g3 = -s + 1.0 - 0.5 * k;
    if dist_nonpos_int(g3) < EPS_POLE {
        return Err(Error::domain(format!("m_limit: Γ(1 − s − k/2) has a pole at s = {s}")));
    }
    let v = ((-s + 1.0) * 2f64.ln() + ln_gamma_mod(s - 0.5 - z) + ln_gamma_mod(s - 0.5 + z) + ln_gamma_mod(g3)).exp();
    Ok(v * rgamma(z + 0.5 - 0.5 * k) * rgamma(-z + 0.5 - 0.5 * k))
}

/// Lemma 2.2.5 gap:
/// (|v| + |r−v| + |r+t−v| − |t−v| + |r−t| − |t|) − max(|r|, |v| − |r|), which is ≥ 0.
pub fn lemma225_gap(v: f64, r: f64, t: f64) -> f64 {
    let lhs = v.abs() + (r - v).abs() + (r + t - v).abs() - (t - v).abs() + (r - t).abs() - t.abs();
    lhs - r.abs().max(v.abs() - r.abs())
}

/// Minimum of [`lemma225_gap`] over `n` uniform samples in [−half_width, half_width]³
/// (ChaCha8 stream from `seed`). Returns (min gap, arg min).
pub fn lemma225_sample(n: usize, half_width: f64, seed: u64) -> (f64, [f64; 3]) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::INFINITY, [0.0; 3]);
    for _ in 0..n {
        let v = rng.gen_range(-half_width..=half_width);
        let r = rng.gen_range(-half_width..=half_width);
        let t = rng.gen_range(-half_width..=half_width);
        let g = lemma225_gap(v, r, t);
        if g < best.0 {
            best = (g, [v, r, t]);
        }
    }
    best
}

/// Least-squares fit of values(x) ≈ Σ cⱼ·basis(x)ⱼ over three basis functions.
/// Returns (c, max residual of the fit). With three points the fit is exact.
pub fn fit3(xs: &[f64], values: &[C64], basis: impl Fn(f64) -> [C64; 3]) -> Result<([C64; 3], f64)> {
    if xs.len() != values.len() || xs.len() < 3 {
        return Err(Error::domain("fit3: need ≥ 3 matching (x, value) pairs"));
    }
    // normal equations  (BᴴB) c = Bᴴ v
    let mut a = [[C64::new(0.0, 0.0); 3]; 3];
    let mut rhs = [C64::new(0.0, 0.0); 3];
    for (&x, &v) in xs.iter().zip(values) {
        let b = basis(x);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += b[i].conj() * b[j];
            }
            rhs[i] += b[i].conj() * v;
        }
    }
    let c = solve3(a, rhs).ok_or_else(|| Error::method("fit3: singular fit"))?;
    let mut resid: f64 = 0.0;
    for (&x, &v) in xs.iter().zip(values) {
        let b = basis(x);
        let fit = c[0] * b[0] + c[1] * b[1] + c[2] * b[2];
        resid = resid.max((fit - v).norm());
    }
    Ok((c, resid))
}

/// δ → 0 extrapolation of M_k(s, z/i, δ) from a δ-ladder.
///
/// With w = δ/(2 − δ) = 1/X, closing the contour of Eq. 2.2.32 to the left gives
/// (2 − δ)^{a}·M = Σₙ cₙwⁿ + Σₙ dₙw^{p+n}, where a = s − ½ + z, b = z − k/2 + ½ and
/// p = b − a = 1 − s − k/2. The first corrections are known exactly:
/// c₁/c₀ = −a(c−a−1)/(b−a−1) and d₁/d₀ = −b(c−b−1)/(a−b−1), with c = s − k/2.
/// The fit basis is {1 + (c₁/c₀)w, w^p(1 + (d₁/d₀)w), w²}. A plain {1, δ^p, δ} fit
/// would leave an O(δ^{p+1}) error, about 2e-6 at the standard ladder. Returns
/// (2^{−a}c₀ = lim M, max fit residual).
pub fn extrapolate_delta(deltas: &[f64], values: &[C64], k: f64, s: C64, z: C64) -> Result<(C64, f64)> {
    let a = s - 0.5 + z;
    let b = z - 0.5 * k + 0.5;
    let c = s - 0.5 * k;
    let p = b - a;
    let ra = -a * (c - a - 1.0) / (b - a - 1.0);
    let rb = -b * (c - b - 1.0) / (a - b - 1.0);
    let ws: Vec<f64> = deltas.iter().map(|&d| d / (2.0 - d)).collect();
    let scaled: Vec<C64> = deltas.iter().zip(values).map(|(&d, &v)| v * (a * (2.0 - d).ln()).exp()).collect();
    let one = C64::new(1.0, 0.0);
    let (coef, resid) = fit3(&ws, &scaled, |w| [one + ra * w, (p * w.ln()).exp() * (one + rb * w), C64::new(w * w, 0.0)])?;
    Ok((coef[0] * (-a * 2f64.ln()).exp(), resid))
}

/// A δ-ladder of [`m_contour`] values extrapolated to δ = 0 and compared with [`m_limit`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct DeltaLimitCheck {
    pub deltas: Vec<f64>,
    pub values: Vec<C64>,
    pub limit: C64,
    pub extrapolated: C64,
    /// |extrapolated − limit|.
    pub residual: f64,
}

/// Evaluate M_k(s, z/i, δ) on `deltas` by [`m_contour`], extrapolate with
/// [`extrapolate_delta`], and compare with [`m_limit`].
pub fn delta_limit_check(k: f64, s: C64, z: C64, deltas: &[f64], cfg: &PrecisionConfig) -> Result<DeltaLimitCheck> {
    let values = deltas
        .iter()
        .map(|&d| {
            let p = MFunctionParams::new(k, s, z, d)?;
            m_contour(&p, default_contour_shift(&p), cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = m_limit(s, z, k)?;
    let (extrapolated, _) = extrapolate_delta(deltas, &values, k, s, z)?;
    Ok(DeltaLimitCheck { deltas: deltas.to_vec(), values, limit, extrapolated, residual: (extrapolated - limit).norm() })
}

fn solve3(mut a: [[C64; 3]; 3], mut b: [C64; 3]) -> Option<[C64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for cc in col..3 {
                let t = a[col][cc];
                a[r][cc] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = [C64::new(0.0, 0.0); 3];
    for r in (0..3).rev() {
        let mut acc = b[r];
        for cc in r + 1..3 {
            acc -= a[r][cc] * x[cc];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}
