//! Mellin–Barnes contour engine.
//!
//! Integrals of the form
//!
//! ```text
//!   (1/2πi) ∫_C  ∏ Γ(αᵢ + εᵢu) / ∏ Γ(βⱼ + εⱼu) · e^{u·L} · g(u) du
//! ```
//!
//! where εᵢ = ±1 and g is entire. C runs from −i∞ to +i∞ and separates the
//! *left* pole families (factors with ε = +1, poles at u = −α − n) from the
//! *right* families (ε = −1, poles at u = α + n).
//!
//! The engine integrates along a vertical line Re u = c. The line may carry one
//! rectangular bulge to the right. Any pole that lands on the wrong side of that
//! path is compensated by adding (left pole) or subtracting (right pole) its residue.
//! As a result the line does not have to separate the families itself. This covers
//! the parameter islands where no straight separating line exists.

use super::gamma::{is_gamma_pole, ln_gamma_mod};
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::util::quad::{adaptive_gk, trapezoid_doubling};
use crate::util::sum::KahanC;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// A gamma factor Γ(α + ε·u) with ε = ±1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFactor {
    pub alpha: C64,
    pub eps: f64,
}

impl GammaFactor {
    /// Γ(α + u): poles to the left.
    pub fn plus(alpha: C64) -> Self {
        GammaFactor { alpha, eps: 1.0 }
    }
    /// Γ(α − u): poles to the right.
    pub fn minus(alpha: C64) -> Self {
        GammaFactor { alpha, eps: -1.0 }
    }
    #[inline]
    fn arg(&self, u: C64) -> C64 {
        self.alpha + u * self.eps
    }
    /// n-th pole location.
    fn pole(&self, n: usize) -> C64 {
        // α + εu = −n  ⇒  u = −(α + n)/ε
        -(self.alpha + n as f64) * self.eps
    }
}

/// Where to put the vertical line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    /// Midway between the rightmost left pole and the leftmost right pole (or the
    /// next right pole beyond the rightmost left pole when the families interleave).
    Midway,
    /// Minimise the integrand modulus on the real axis inside the separating gap
    /// (falls back to `Midway` when the families interleave).
    Saddle,
    /// Caller-supplied abscissa.
    Fixed(f64),
}

/// Optional rectangular bulge [c, c_right] × [v_lo, v_hi] of the contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bulge {
    pub v_lo: f64,
    pub v_hi: f64,
    /// Right edge; `None` selects it automatically by minimising the sampled integrand modulus.
    pub c_right: Option<f64>,
}

/// Contour options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions {
    pub placement: Placement,
    pub bulge: Option<Bulge>,
    /// Extra truncation height beyond `contour_height + max|Im α| + 10`.
    pub extra_height: f64,
    /// Left/right pole families closer than this are reported as a collision.
    pub collision_gap: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions { placement: Placement::Saddle, bulge: None, extra_height: 0.0, collision_gap: COLLISION_GAP }
    }
}

/// Diagnostics of one contour evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbOutcome {
    pub value: C64,
    /// Abscissa of the vertical line.
    pub c: f64,
    /// Right edge of the bulge, if one was used.
    pub c_right: Option<f64>,
    /// Number of residues added or subtracted.
    pub residues: usize,
    /// Largest sampled modulus of the integrand on the path (cancellation scale).
    pub peak: f64,
}

/// Minimum allowed distance between colliding left/right poles.
pub const COLLISION_GAP: f64 = 1e-3;

/// A Mellin–Barnes integrand.
pub struct MbIntegral<'a> {
    pub num: Vec<GammaFactor>,
    pub den: Vec<GammaFactor>,
    pub log_base: C64,
    pub extra: Option<&'a (dyn Fn(C64) -> C64 + Sync)>,
}

impl<'a> MbIntegral<'a> {
    pub fn new(num: Vec<GammaFactor>, den: Vec<GammaFactor>, log_base: C64) -> Self {
        MbIntegral { num, den, log_base, extra: None }
    }

    pub fn with_extra(mut self, g: &'a (dyn Fn(C64) -> C64 + Sync)) -> Self {
        self.extra = Some(g);
        self
    }

    /// log of the gamma/exponential part (mod 2πi); −∞ real part at zeros.
    #[inline]
    pub fn log_kernel(&self, u: C64) -> C64 {
        let mut acc = u * self.log_base;
        for f in &self.num {
            acc += ln_gamma_mod(f.arg(u));
        }
        for f in &self.den {
            let a = f.arg(u);
            if is_gamma_pole(a) {
                return C64::new(f64::NEG_INFINITY, 0.0);
            }
            acc -= ln_gamma_mod(a);
        }
        acc
    }

    /// Integrand value.
    #[inline]
    pub fn eval(&self, u: C64) -> C64 {
        let k = self.log_kernel(u);
        if k.re == f64::NEG_INFINITY {
            return C64::new(0.0, 0.0);
        }
        let v = k.exp();
        match self.extra {
            Some(g) => v * g(u),
            None => v,
        }
    }

    fn max_left(&self) -> f64 {
        self.num.iter().filter(|f| f.eps > 0.0).map(|f| f.pole(0).re).fold(f64::NEG_INFINITY, f64::max)
    }

    fn min_right(&self) -> f64 {
        self.num.iter().filter(|f| f.eps < 0.0).map(|f| f.pole(0).re).fold(f64::INFINITY, f64::min)
    }

    /// Smallest right-family pole real part strictly greater than `x`.
    fn next_right_above(&self, x: f64) -> f64 {
        let mut best = f64::INFINITY;
        for f in self.num.iter().filter(|f| f.eps < 0.0) {
            let p0 = f.pole(0).re;
            let n = if p0 > x { 0.0 } else { (x - p0).floor() + 1.0 };
            best = best.min(p0 + n);
        }
        best
    }

    /// Check that no left pole coincides (within `gap`) with a right pole.
    pub fn check_collisions(&self, gap: f64) -> Result<()> {
        for l in self.num.iter().filter(|f| f.eps > 0.0) {
            for r in self.num.iter().filter(|f| f.eps < 0.0) {
                // left poles −α_l − n, right poles α_r + m: coincide iff −α_l − α_r = n + m
                let w = -(l.alpha + r.alpha);
                if w.im.abs() < gap && w.re > -gap && (w.re - w.re.round()).abs() < gap {
                    return Err(Error::method(format!(
                        "pole collision: left family at {} meets right family at {} (gap {:.2e})",
                        -l.alpha,
                        r.alpha,
                        (w - w.re.round().max(0.0)).norm()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Residue of the integrand at the n-th pole of numerator factor `i`.
    pub fn residue(&self, i: usize, n: usize) -> Result<C64> {
        let f = self.num[i];
        let p = f.pole(n);
        let mut acc = p * self.log_base;
        for (j, g) in self.num.iter().enumerate() {
            if j == i {
                continue;
            }
            let a = g.arg(p);
            if a.im.abs() < 1e-9 && a.re <= 1e-9 && (a.re - a.re.round()).abs() < 1e-9 {
                return Err(Error::method(format!("double pole at u = {p}")));
            }
            acc += ln_gamma_mod(a);
        }
        for g in &self.den {
            let a = g.arg(p);
            if is_gamma_pole(C64::new(a.re.round(), 0.0)) && (a - a.re.round()).norm() < 1e-12 {
                return Ok(C64::new(0.0, 0.0));
            }
            acc -= ln_gamma_mod(a);
        }
        // Res_{u=p} Γ(α + εu) = (−1)^n / (n! ε)
        let mut lnfact = 0.0;
        for j in 2..=n {
            lnfact += (j as f64).ln();
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 } / f.eps;
        let mut v = (acc - lnfact).exp() * sign;
        if let Some(g) = self.extra {
            v *= g(p);
        }
        Ok(v)
    }

    fn choose_line(&self, placement: Placement) -> Result<f64> {
        let l = self.max_left();
        let r = self.min_right();
        let midway = || {
            if l < r {
                if l.is_finite() && r.is_finite() {
                    0.5 * (l + r)
                } else if l.is_finite() {
                    l + 0.5
                } else if r.is_finite() {
                    r - 0.5
                } else {
                    0.0
                }
            } else {
                let rn = self.next_right_above(l);
                0.5 * (l + rn.min(l + 1.0))
            }
        };
        match placement {
            Placement::Fixed(c) => Ok(c),
            Placement::Midway => Ok(midway()),
            Placement::Saddle => {
                if !(l < r) || !l.is_finite() || !r.is_finite() {
                    return Ok(midway());
                }
                let gap = r - l;
                let (mut a, mut b) = (l + 0.15 * gap, r - 0.15 * gap);
                let f = |c: f64| self.log_kernel(C64::new(c, 0.0)).re;
                let g = 0.618_033_988_749_895;
                let mut x1 = b - g * (b - a);
                let mut x2 = a + g * (b - a);
                let (mut f1, mut f2) = (f(x1), f(x2));
                for _ in 0..40 {
                    if f1 < f2 {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - g * (b - a);
                        f1 = f(x1);
                    } else {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + g * (b - a);
                        f2 = f(x2);
                    }
                }
                Ok(0.5 * (a + b))
            }
        }
    }

    fn height(&self, cfg: &PrecisionConfig, opts: &ContourOptions) -> f64 {
        let im = self.num.iter().chain(self.den.iter()).map(|f| f.alpha.im.abs()).fold(0.0, f64::max);
        cfg.contour_height + im + 10.0 + opts.extra_height
    }

    /// Evaluate (1/2πi)∫_C.
    pub fn evaluate(&self, opts: &ContourOptions, cfg: &PrecisionConfig) -> Result<MbOutcome> {
        self.check_collisions(opts.collision_gap)?;
        let c = self.choose_line(opts.placement)?;
        let mut height = self.height(cfg, opts);
        let tol = cfg.rel_tol.max(1e-15);

        // Bulge selection.
        let bulge = match opts.bulge {
            None => None,
            Some(b) => {
                let cr = match b.c_right {
                    Some(cr) => Some(cr),
                    None => self.auto_bulge_edge(c, b.v_lo, b.v_hi),
                };
                cr.map(|cr| (b.v_lo, b.v_hi, cr))
            }
        };
        if let Some((vlo, vhi, cr)) = bulge {
            height = height.max(vhi.abs() + 10.0).max(vlo.abs() + 10.0);
            // the bulge rectangle must not contain poles
            for (i, f) in self.num.iter().enumerate() {
                for n in 0..10_000 {
                    let p = f.pole(n);
                    if f.eps > 0.0 && p.re < c - 1.0 || f.eps < 0.0 && p.re > cr + 1.0 {
                        break;
                    }
                    if p.im > vlo - COLLISION_GAP && p.im < vhi + COLLISION_GAP && p.re > c - COLLISION_GAP && p.re < cr + COLLISION_GAP {
                        return Err(Error::method(format!("pole {p} of factor {i} inside/on contour bulge")));
                    }
                }
            }
        }

        // Residue corrections for poles on the wrong side of the path.
        let left_of_path = |p: C64| match bulge {
            Some((vlo, vhi, cr)) if p.im > vlo && p.im < vhi => p.re < cr,
            _ => p.re < c,
        };
        let path_right_edge = bulge.map(|b| b.2.max(c)).unwrap_or(c);
        let mut corr = KahanC::new();
        let mut nres = 0;
        for (i, f) in self.num.iter().enumerate() {
            for n in 0..100_000 {
                let p = f.pole(n);
                if f.eps > 0.0 {
                    if p.re < c - 1e-12 {
                        break;
                    }
                } else if p.re > path_right_edge + 1e-12 {
                    break;
                }
                let in_bulge_band = bulge.map(|b| p.im > b.0 && p.im < b.1).unwrap_or(false);
                if (p.re - c).abs() < 1e-9 && !in_bulge_band {
                    return Err(Error::method(format!("contour line Re u = {c} passes through pole {p}")));
                }
                let left = left_of_path(p);
                if f.eps > 0.0 && !left {
                    corr.add(self.residue(i, n)?);
                    nres += 1;
                } else if f.eps < 0.0 && left {
                    corr.add(-self.residue(i, n)?);
                    nres += 1;
                }
            }
        }

        // Quadrature along the path.
        let (integral, peak) = match bulge {
            None => self.line_integral(c, &mut height, cfg, tol)?,
            Some((vlo, vhi, cr)) => self.bulge_integral(c, vlo, vhi, cr, height, cfg, tol)?,
        };
        Ok(MbOutcome { value: integral + corr.value(), c, c_right: bulge.map(|b| b.2), residues: nres, peak })
    }

    /// The bare line integral (1/2πi)∫_{(c)} with no residue compensation, so the caller
    /// accounts for every pole on either side. Errors if a pole lies within 1e-9 of the line.
    pub fn line_only(&self, c: f64, cfg: &PrecisionConfig) -> Result<C64> {
        for (i, f) in self.num.iter().enumerate() {
            // real parts of the poles of factor i are −α.re/ε − n/ε
            let base = -f.alpha.re * f.eps;
            let frac = (c - base) * f.eps;
            if frac <= 1e-9 && (frac - frac.round()).abs() < 1e-9 {
                return Err(Error::method(format!("line Re u = {c} passes through a pole of factor {i}")));
            }
        }
        let mut height = self.height(cfg, &ContourOptions::default());
        let tol = cfg.rel_tol.max(1e-15);
        Ok(self.line_integral(c, &mut height, cfg, tol)?.0)
    }

    fn sample_peak(&self, pts: impl Iterator<Item = C64>) -> f64 {
        pts.map(|u| self.eval(u).norm()).fold(0.0, f64::max)
    }

    fn line_integral(&self, c: f64, height: &mut f64, cfg: &PrecisionConfig, tol: f64) -> Result<(C64, f64)> {
        for _attempt in 0..4 {
            let h = *height;
            let nsamp = 400;
            let peak = self.sample_peak((0..=nsamp).map(|j| C64::new(c, -h + 2.0 * h * j as f64 / nsamp as f64)));
            let tail = self.eval(C64::new(c, h)).norm().max(self.eval(C64::new(c, -h)).norm());
            if tail > 1e-3 * tol * peak {
                *height *= 1.5;
                continue;
            }
            let n0 = (2.0 * h * cfg.quad_points as f64).ceil() as usize;
            let val = trapezoid_doubling(|v| self.eval(C64::new(c, v)), -h, h, n0, tol, 1e-2 * tol * peak, 12)?;
            return Ok((val / (2.0 * PI), peak));
        }
        Err(Error::accuracy("Mellin–Barnes integrand does not decay within the truncation height", 1.0))
    }

    #[allow(clippy::too_many_arguments)]
    fn bulge_integral(&self, c: f64, vlo: f64, vhi: f64, cr: f64, height: f64, cfg: &PrecisionConfig, tol: f64) -> Result<(C64, f64)> {
        // path pieces as (start, end) straight segments
        let pts = [
            C64::new(c, -height),
            C64::new(c, vlo),
            C64::new(cr, vlo),
            C64::new(cr, vhi),
            C64::new(c, vhi),
            C64::new(c, height),
        ];
        let mut peak: f64 = 0.0;
        for w in pts.windows(2) {
            peak = peak.max(self.sample_peak((0..=64).map(|j| w[0] + (w[1] - w[0]) * (j as f64 / 64.0))));
        }
        let tail = self.eval(pts[0]).norm().max(self.eval(pts[5]).norm());
        if tail > 1e-3 * tol * peak {
            return Err(Error::accuracy("Mellin–Barnes integrand does not decay within the truncation height", tail / peak));
        }
        let mut acc = KahanC::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = (b - a).norm();
            if len == 0.0 {
                continue;
            }
            let dir = (b - a) / len;
            let (v, _) = adaptive_gk(|s| self.eval(a + dir * s) * dir, 0.0, len, 1e-2 * tol * peak, 32.0 * f64::EPSILON, 4000)?;
            acc.add(v);
        }
        let _ = cfg;
        Ok((acc.value() / C64::new(0.0, 2.0 * PI), peak))
    }

    /// Choose the bulge's right edge by minimising the sampled maximum modulus.
    fn auto_bulge_edge(&self, c: f64, vlo: f64, vhi: f64) -> Option<f64> {
        let score = |cr: f64| {
            let mut m: f64 = 0.0;
            for j in 0..=24 {
                let t = j as f64 / 24.0;
                m = m.max(self.eval(C64::new(cr, vlo + (vhi - vlo) * t)).norm());
                m = m.max(self.eval(C64::new(c + (cr - c) * t, vlo)).norm());
                m = m.max(self.eval(C64::new(c + (cr - c) * t, vhi)).norm());
            }
            m
        };
        let base = score(c);
        let mut best = (base, None);
        for j in 1..=24 {
            let cr = c + 0.5 * j as f64;
            // keep the rectangle pole-free
            let clash = self.num.iter().any(|f| {
                (0..200).any(|n| {
                    let p = f.pole(n);
                    p.im > vlo - 0.05 && p.im < vhi + 0.05 && p.re > c - 0.05 && p.re < cr + 0.05
                })
            });
            if clash {
                break;
            }
            let s = score(cr);
            if s < best.0 {
                best = (s, Some(cr));
            }
        }
        best.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn beta_contour_identity() {
        // (1/2πiΓ(β)) ∫_{(−γ)} Γ(−z)Γ(β+z) t^z dz = (1+t)^{−β}
        let (beta, gamma_, t) = (2.5f64, 0.7f64, 3.0f64);
        let mb = MbIntegral::new(vec![GammaFactor::minus(c(0.0, 0.0)), GammaFactor::plus(c(beta, 0.0))], vec![], c(t.ln(), 0.0));
        let cfg = PrecisionConfig::default();
        let out = mb.evaluate(&ContourOptions { placement: Placement::Fixed(-gamma_), ..Default::default() }, &cfg).unwrap();
        let g = super::super::gamma::gamma_real(beta).unwrap();
        let lhs = out.value / g;
        let rhs = (1.0 + t).powf(-beta);
        assert!((lhs.re - rhs).abs() / rhs < 1e-12, "{lhs} vs {rhs}");
        assert!(lhs.im.abs() < 1e-13);
    }

    #[test]
    fn shifted_line_adds_residues() {
        // same identity with the line moved right past poles 0, 1: residues compensate
        let (beta, t) = (2.5f64, 0.4f64);
        let mb = MbIntegral::new(vec![GammaFactor::minus(c(0.0, 0.0)), GammaFactor::plus(c(beta, 0.0))], vec![], c(t.ln(), 0.0));
        let cfg = PrecisionConfig::default();
        let g = super::super::gamma::gamma_real(beta).unwrap();
        for &cc in &[-0.7, 1.5, -3.3] {
            let out = mb.evaluate(&ContourOptions { placement: Placement::Fixed(cc), ..Default::default() }, &cfg).unwrap();
            let lhs = out.value / g;
            let rhs = (1.0 + t).powf(-beta);
            assert!((lhs.re - rhs).abs() / rhs < 1e-12, "c={cc}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn collision_detected() {
        let mb = MbIntegral::new(vec![GammaFactor::minus(c(0.0, 0.0)), GammaFactor::plus(c(-2.0, 0.0))], vec![], c(0.0, 0.0));
        assert!(matches!(mb.check_collisions(COLLISION_GAP), Err(Error::Method(_))));
    }
}
