//! Quadrature rules: Gauss–Legendre, adaptive Gauss–Kronrod, and doubling trapezoid.

use super::sum::KahanC;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp;
        loop {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Cached 20-point Gauss–Legendre rule.
pub fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(20))
}

/// Cached 40-point Gauss–Legendre rule.
pub fn gl40() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(40))
}

/// Composite Gauss–Legendre rule on [a, b] with `panels` equal panels of the given rule.
pub fn composite_gl_nodes(a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels * rule.0.len());
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (xi, wi) in rule.0.iter().zip(rule.1.iter()) {
            out.push((mid + 0.5 * h * xi, 0.5 * h * wi));
        }
    }
    out
}

// Gauss–Kronrod 7/15 abscissae and weights (QUADPACK).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        rk += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            rg += (f1 + f2) * WG[j / 2];
        }
    }
    let val = rk * h;
    let err = ((rk - rg) * h).norm();
    (val, err)
}

/// Adaptive Gauss–Kronrod (7/15) integration of a complex function on [a, b].
///
/// Stops when the global error estimate is below `max(abs_tol, rel_tol·|I|)`.
/// Returns the value and the error estimate.
pub fn adaptive_gk<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<(C64, f64)> {
    if a == b {
        return Ok((C64::new(0.0, 0.0), 0.0));
    }
    let mut intervals: Vec<(f64, f64, C64, f64)> = Vec::new();
    let (v, e) = gk15(&mut f, a, b);
    intervals.push((a, b, v, e));
    loop {
        let mut total = KahanC::new();
        let mut err = 0.0;
        let mut worst = 0;
        for (i, iv) in intervals.iter().enumerate() {
            total.add(iv.2);
            err += iv.3;
            if iv.3 > intervals[worst].3 {
                worst = i;
            }
        }
        let total = total.value();
        let target = abs_tol.max(rel_tol * total.norm());
        if err <= target {
            return Ok((total, err));
        }
        if intervals.len() >= max_intervals {
            return Err(Error::accuracy("adaptive Gauss–Kronrod subdivision limit reached", err / total.norm().max(1e-300)));
        }
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Trapezoid rule on [a, b] with doubling until two successive levels agree to
/// `rel_tol` (relative to the running value, with absolute floor `abs_tol`).
///
/// Intended for integrands that are negligible at both ends, for which the
/// trapezoid rule converges geometrically. `n0` is the initial number of intervals.
pub fn trapezoid_doubling<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    n0: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_levels: usize,
) -> Result<C64> {
    let n0 = n0.max(2);
    let mut h = (b - a) / n0 as f64;
    let mut acc = KahanC::new();
    acc.add((f(a) + f(b)) * 0.5);
    for j in 1..n0 {
        acc.add(f(a + j as f64 * h));
    }
    let mut sum = acc.value();
    let mut prev = sum * h;
    let mut n = n0;
    for level in 0..max_levels {
        let mut mids = KahanC::new();
        for j in 0..n {
            mids.add(f(a + (j as f64 + 0.5) * h));
        }
        sum += mids.value();
        n *= 2;
        h *= 0.5;
        let cur = sum * h;
        let diff = (cur - prev).norm();
        if level >= 1 && diff <= abs_tol.max(rel_tol * cur.norm()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::accuracy("trapezoid doubling did not stabilise", (prev.norm() - sum.norm() * h).abs() / prev.norm().max(1e-300)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(w.iter()).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn gk_integrates_exp() {
        let (v, _) = adaptive_gk(|x| C64::new(x.exp(), 0.0), 0.0, 3.0, 0.0, 1e-14, 100).unwrap();
        assert!((v.re - (3f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_gaussian() {
        let v = trapezoid_doubling(|x| C64::new((-x * x).exp(), 0.0), -10.0, 10.0, 8, 1e-15, 0.0, 12).unwrap();
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }
}
