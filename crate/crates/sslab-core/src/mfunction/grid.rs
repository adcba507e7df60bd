//! Cross-representation grids: the three-way agreement of Eq. 2.2.1, Eq. 2.2.28 and
//! Eq. 2.2.32, and the Prop 2.2.2 truncation decay.
//!
//! Truncation at Y loses two pieces of M_k:
//!
//! * a head ∫_0^{2πh/Y}, which behaves like (2πh/Y)^{σ−½−|Re z|};
//! * a tail ∫_{2πhY}^∞, which behaves like e^{−2πhYδ}(2πhY)^{σ−1+k/2}.
//!
//! Agreement to 1e-6 with Y fixed at 60 therefore needs both σ − ½ − |Re z| large and
//! 2πhYδ ≳ 30–40. The grid meets this by choosing h for each tuple from endpoint
//! estimates of the integrand ([`choose_h`]).

use super::{m_closed, m_contour, m_truncated_quadrature, default_contour_shift, MFunctionParams};
use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::specfun::whittaker_w_scaled;
use crate::util::sum::par_map;
use crate::C64;
use std::f64::consts::PI;

/// Y of the three-way grid.
pub const GRID_Y: f64 = 60.0;
/// Pairwise agreement contract of the three-way grid.
pub const GRID_TOL: f64 = 1e-6;

/// |integrand| in t = ln y at y, i.e. |y^{s−1}e^{y(1−δ)}W_{k/2,z}(2y)|.
fn integrand_abs(p: &MFunctionParams, y: f64, cfg: &PrecisionConfig) -> Result<f64> {
    let w = whittaker_w_scaled(0.5 * p.k, p.z, 2.0 * y, cfg)?;
    Ok((((p.s - 1.0) * y.ln()).exp() * w).norm() * (-p.delta * y).exp())
}

/// Estimated (head, tail) lost by truncating at (Y, h).
///
/// The head integrand is ≈ C·y^e in ln y, with e = σ − ½ − |Re z|, giving
/// |f(a)|/e. The tail integrand is ≈ e^{−δy}y^p, giving ≈ |f(b)|/(δb − p).
pub fn truncation_estimates(p: &MFunctionParams, y_cut: f64, h: u64, cfg: &PrecisionConfig) -> Result<(f64, f64)> {
    let a = 2.0 * PI * h as f64 / y_cut;
    let b = 2.0 * PI * h as f64 * y_cut;
    let e = p.s.re - 0.5 - p.z.re.abs();
    if !(e > 0.0) {
        return Err(Error::domain("truncation_estimates: requires Re(s − 1/2 ± z) > 0"));
    }
    let pw = p.s.re - 1.0 + 0.5 * p.k;
    let head = integrand_abs(p, a, cfg)? / e;
    let rate = p.delta * b - pw;
    let tail = if rate > 1.0 { integrand_abs(p, b, cfg)? / rate } else { f64::INFINITY };
    Ok((head, tail))
}

/// Smallest h ≤ 4096 with the estimated head and tail both ≤ target·|M|.
pub fn choose_h(p: &MFunctionParams, y_cut: f64, target: f64, cfg: &PrecisionConfig) -> Result<u64> {
    let m = m_closed(p, cfg)?.norm();
    let mut h = 1u64;
    while h <= 4096 {
        let (head, tail) = truncation_estimates(p, y_cut, h, cfg)?;
        if head > target * m {
            break;
        }
        if tail <= target * m {
            return Ok(h);
        }
        h = if h < 8 { h + 1 } else { h + h / 4 };
    }
    Err(Error::domain(format!(
        "choose_h: no h makes both truncation pieces ≤ {target:.0e}·|M| at Y = {y_cut} (k = {}, s = {}, z = {}, δ = {})",
        p.k, p.s, p.z, p.delta
    )))
}

/// The 40-tuple grid: 20 tuples at each of k = 0 and k = −12, with δ ∈ {0.5, 0.1, 0.02}.
/// Every tuple has Re(s − ½ ± z) ≥ 6.25, far above the 0.2 floor of the contract, so that
/// Y = 60 loses < 1e-8 of M.
pub fn default_grid() -> Vec<MFunctionParams> {
    // weight −12 carries 1/Γ(s + 6), which shrinks M against the head: shift σ up by 3
    let sig = |k: f64| if k == 0.0 { [7.0, 7.6, 8.3, 9.1] } else { [10.0, 10.6, 11.3, 12.1] };
    let tau = [0.0, 0.7, -1.3, 2.1, -0.4];
    let zs = [C64::new(0.0, 0.4), C64::new(0.3, 0.2), C64::new(-0.25, 1.1), C64::new(0.1, 0.0), C64::new(0.0, 2.3)];
    let deltas = [0.5, 0.1, 0.02];
    let mut out = Vec::with_capacity(40);
    for k in [0.0, -12.0] {
        for i in 0..20usize {
            let s = C64::new(sig(k)[i % 4], tau[(i / 4) % 5]);
            let z = zs[i % 5];
            let d = deltas[(i + i / 5) % 3];
            out.push(MFunctionParams::new(k, s, z, d).expect("grid tuple is valid"));
        }
    }
    out
}

/// One row of the three-way comparison.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CrossCheck {
    pub k: f64,
    pub s: C64,
    pub z: C64,
    pub delta: f64,
    pub h: u64,
    pub quadrature: C64,
    pub closed: C64,
    pub contour: C64,
    /// Largest pairwise relative difference.
    pub max_rel: f64,
}

/// Evaluate all three representations at one tuple; the quadrature is truncated at
/// (Y, h) with h from [`choose_h`].
pub fn cross_check(p: &MFunctionParams, y_cut: f64, cfg: &PrecisionConfig) -> Result<CrossCheck> {
    let h = choose_h(p, y_cut, 1e-8, cfg)?;
    let quadrature = m_truncated_quadrature(&p.with_truncation(y_cut, h)?, cfg)?;
    let closed = m_closed(p, cfg)?;
    let contour = m_contour(p, default_contour_shift(p), cfg)?;
    let rel = |a: C64, b: C64| (a - b).norm() / a.norm().max(b.norm());
    let max_rel = rel(quadrature, closed).max(rel(closed, contour)).max(rel(quadrature, contour));
    Ok(CrossCheck { k: p.k, s: p.s, z: p.z, delta: p.delta, h, quadrature, closed, contour, max_rel })
}

/// [`cross_check`] over a grid, in parallel, results in grid order.
pub fn cross_check_grid(grid: &[MFunctionParams], y_cut: f64, cfg: &PrecisionConfig) -> Vec<Result<CrossCheck>> {
    par_map(0, grid.len(), |i| cross_check(&grid[i], y_cut, cfg))
}

/// Three tuples for the Prop 2.2.2 decay check, each with its fixed h.
pub fn decay_tuples() -> Vec<(MFunctionParams, u64)> {
    vec![
        (MFunctionParams::new(0.0, C64::new(9.0, 0.0), C64::new(0.0, 0.3), 0.5).unwrap(), 1),
        (MFunctionParams::new(-12.0, C64::new(9.5, 1.0), C64::new(0.2, 0.0), 0.3).unwrap(), 1),
        (MFunctionParams::new(0.0, C64::new(10.0, 0.5), C64::new(0.0, 1.5), 0.2).unwrap(), 1),
    ]
}

/// |M_{Y,h} − M_closed|/|M_closed| for each Y.
pub fn truncation_decay(p: &MFunctionParams, h: u64, ys: &[f64], cfg: &PrecisionConfig) -> Result<Vec<(f64, f64)>> {
    let closed = m_closed(p, cfg)?;
    let vals: Vec<Result<(f64, f64)>> = par_map(0, ys.len(), |i| {
        let q = m_truncated_quadrature(&p.with_truncation(ys[i], h)?, cfg)?;
        Ok((ys[i], (q - closed).norm() / closed.norm()))
    });
    vals.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_three_way() {
        let cfg = PrecisionConfig::default();
        let grid = default_grid();
        assert_eq!(grid.len(), 40);
        for g in &grid {
            assert!((g.s - 0.5 + g.z).re > 0.2 && (g.s - 0.5 - g.z).re > 0.2);
        }
        for r in cross_check_grid(&grid, GRID_Y, &cfg) {
            let r = r.unwrap();
            assert!(r.max_rel <= GRID_TOL, "{r:?}");
        }
    }

    #[test]
    fn truncation_decays() {
        let cfg = PrecisionConfig::default();
        for (p, h) in decay_tuples() {
            let d = truncation_decay(&p, h, &[5.0, 10.0, 20.0, 40.0], &cfg).unwrap();
            assert!(d.windows(2).all(|w| w[1].1 < w[0].1), "{d:?}");
            assert!(d[3].1 <= 1e-6, "{d:?}");
        }
    }
}
