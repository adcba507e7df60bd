//! Petersson inner products over the standard fundamental domain
//! F = {|x| ≤ ½, |z| ≥ 1}.
//!
//! The domain is split at y = 1.
//!
//! * Upper part (y ≥ 1): a tensor rule. The x-direction uses the trapezoid rule,
//!   which is spectrally accurate because F·conj(G) is 1-periodic in x. The
//!   y-direction uses composite Gauss–Legendre panels, added until the cusp decay
//!   makes further panels negligible.
//! * Lower part (√3/2 ≤ y ≤ 1): parametrized exactly. With y = cos φ for φ ∈ [0, π/6],
//!   the x-range is the two intervals ±[sin φ, ½]. The inner integral is therefore
//!   smooth in φ and Gauss–Legendre converges geometrically in both directions.

use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::util::quad::gauss_legendre;
use crate::util::sum::{pairwise_sum_c, par_map, KahanC};
use crate::C64;

/// A function on the upper half-plane that can be evaluated along horizontal rows.
///
/// `eval_row(y, xs)` returns the values at `x + iy` for each `x` in `xs`. Fourier-type
/// implementations compute their y-dependent radial factors once per row.
pub trait Automorphic: Sync {
    fn eval_row(&self, y: f64, xs: &[f64]) -> Result<Vec<C64>>;

    /// Value at a single point.
    fn eval(&self, z: C64) -> Result<C64> {
        if !(z.im > 0.0) {
            return Err(Error::domain(format!("evaluation point {z} not in the upper half-plane")));
        }
        Ok(self.eval_row(z.im, &[z.re])?[0])
    }
}

/// Adapter turning a closure `z ↦ value` into an [`Automorphic`].
pub struct FnForm<F: Fn(C64) -> Result<C64> + Sync>(pub F);

impl<F: Fn(C64) -> Result<C64> + Sync> Automorphic for FnForm<F> {
    fn eval_row(&self, y: f64, xs: &[f64]) -> Result<Vec<C64>> {
        xs.iter().map(|&x| (self.0)(C64::new(x, y))).collect()
    }
}

/// Pointwise product a(z)·b(z), or a(z)·conj(b(z)) when `conj_b` is set.
pub struct Product<'a> {
    pub a: &'a dyn Automorphic,
    pub b: &'a dyn Automorphic,
    pub conj_b: bool,
}

impl Automorphic for Product<'_> {
    fn eval_row(&self, y: f64, xs: &[f64]) -> Result<Vec<C64>> {
        let va = self.a.eval_row(y, xs)?;
        let vb = self.b.eval_row(y, xs)?;
        Ok(va.iter().zip(vb.iter()).map(|(p, q)| if self.conj_b { p * q.conj() } else { p * q }).collect())
    }
}

/// Cap on the cusp cutoff: an integrand that has not decayed by here is non-decaying.
const Y_CAP: f64 = 60.0;
const PANEL: f64 = 0.5;

struct Row {
    y: f64,
    xs: Vec<f64>,
    wx: Vec<f64>,
    /// Weight of the row in the outer (y or φ) rule, including the Jacobian.
    wy: f64,
}

fn row_value(f: &dyn Automorphic, g: &dyn Automorphic, row: &Row) -> Result<C64> {
    let vf = f.eval_row(row.y, &row.xs)?;
    let vg = g.eval_row(row.y, &row.xs)?;
    let mut acc = KahanC::new();
    for i in 0..row.xs.len() {
        acc.add(vf[i] * vg[i].conj() * row.wx[i]);
    }
    Ok(acc.value() * (row.wy / (row.y * row.y)))
}

fn eval_rows(f: &dyn Automorphic, g: &dyn Automorphic, rows: &[Row]) -> Result<C64> {
    let vals: Vec<Result<C64>> = par_map(0, rows.len(), |i| row_value(f, g, &rows[i]));
    let vals: Vec<C64> = vals.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum_c(&vals))
}

fn lower_rows(order: usize) -> Vec<Row> {
    let (t, w) = gauss_legendre(order);
    let phi_hi = std::f64::consts::PI / 6.0;
    let mut rows = Vec::with_capacity(order);
    for (&tp, &wp) in t.iter().zip(w.iter()) {
        let phi = 0.5 * phi_hi * (tp + 1.0);
        let y = phi.cos();
        let wy = 0.5 * phi_hi * wp * phi.sin();
        let lo = phi.sin();
        let half = 0.5 * (0.5 - lo);
        let mut xs = Vec::with_capacity(2 * order);
        let mut wx = Vec::with_capacity(2 * order);
        for (&tx, &wxx) in t.iter().zip(w.iter()) {
            let x = lo + half * (tx + 1.0);
            xs.push(x);
            wx.push(half * wxx);
            xs.push(-x);
            wx.push(half * wxx);
        }
        rows.push(Row { y, xs, wx, wy });
    }
    rows
}

fn upper_panel_rows(y0: f64, order: usize, nx: usize) -> Vec<Row> {
    let (t, w) = gauss_legendre(order);
    let xs: Vec<f64> = (0..nx).map(|j| -0.5 + (j as f64 + 0.5) / nx as f64).collect();
    let wx = vec![1.0 / nx as f64; nx];
    t.iter()
        .zip(w.iter())
        .map(|(&ty, &wy)| Row { y: y0 + 0.5 * PANEL * (ty + 1.0), xs: xs.clone(), wx: wx.clone(), wy: 0.5 * PANEL * wy })
        .collect()
}

/// ⟨F, G⟩ = ∫∫_F F(z)·conj(G(z)) dx dy / y².
///
/// Orders are tied to `cfg.quad_points` (q): 3q Gauss–Legendre nodes per direction in
/// the lower part, 2q nodes per y-panel of width ½, and 4q trapezoid nodes in x.
/// Panels stop once three consecutive panels each contribute below
/// 1e-3·rel_tol of the running total. If the integrand has not decayed by y = 60,
/// a domain error is returned (e.g. a product of two Eisenstein series).
pub fn petersson_inner(f: &dyn Automorphic, g: &dyn Automorphic, cfg: &PrecisionConfig) -> Result<C64> {
    let q = cfg.quad_points.max(8);
    let lower = lower_rows(3 * q);
    let mut total = vec![eval_rows(f, g, &lower)?];
    let mut y0 = 1.0;
    let mut quiet = 0;
    while y0 < Y_CAP {
        let rows = upper_panel_rows(y0, 2 * q, 4 * q);
        let panel = eval_rows(f, g, &rows)?;
        total.push(panel);
        let running = pairwise_sum_c(&total);
        if panel.norm() <= 1e-3 * cfg.rel_tol * running.norm() || (panel.norm() == 0.0 && running.norm() == 0.0) {
            quiet += 1;
            if quiet >= 3 {
                return Ok(running);
            }
        } else {
            quiet = 0;
        }
        y0 += PANEL;
    }
    Err(Error::domain(format!(
        "petersson_inner: integrand does not decay at the cusp (still significant at y = {Y_CAP}); \
         at least one factor must be a cusp form"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_of_fundamental_domain_via_decaying_weight() {
        // ∫∫_F e^{−y}·y² dxdy/y² = ∫_{-1/2}^{1/2} e^{−√(1−x²)} dx (exact 1-D integral)
        let f = FnForm(|z: C64| Ok(C64::new((-z.im).exp() * z.im * z.im, 0.0)));
        let one = FnForm(|_z: C64| Ok(C64::new(1.0, 0.0)));
        let v = petersson_inner(&f, &one, &PrecisionConfig::default()).unwrap();
        let exact = crate::util::quad::adaptive_gk(|x| C64::new((-(1.0 - x * x).sqrt()).exp(), 0.0), -0.5, 0.5, 0.0, 1e-15, 100)
            .unwrap()
            .0;
        assert!((v - exact).norm() < 1e-12, "{v} vs {exact}");
    }

    #[test]
    fn non_decaying_rejected() {
        let one = FnForm(|_z: C64| Ok(C64::new(1.0, 0.0)));
        let grow = FnForm(|z: C64| Ok(C64::new(z.im * z.im, 0.0)));
        assert!(matches!(petersson_inner(&grow, &one, &PrecisionConfig::default()), Err(Error::Domain(_))));
    }
}
