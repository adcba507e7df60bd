//! Compensated and deterministic summation.
//!
//! Parallel reductions split the index range into fixed-size blocks, sum each
//! block sequentially with Kahan–Neumaier compensation, and then combine the block
//! sums by pairwise reduction in block order. The result therefore does not
//! depend on the number of worker threads.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Fixed block size for deterministic parallel reductions.
pub const BLOCK: usize = 256;

/// Kahan–Neumaier compensated accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Kahan–Neumaier compensated accumulator for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanC {
    re: Kahan,
    im: Kahan,
}

impl KahanC {
    pub fn new() -> Self {
        Self::default()
    }
    #[inline]
    pub fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }
    #[inline]
    pub fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of a slice.
pub fn kahan_sum(xs: &[f64]) -> f64 {
    let mut k = Kahan::new();
    for &x in xs {
        k.add(x);
    }
    k.value()
}

/// Compensated sum of a complex slice.
pub fn kahan_sum_c(xs: &[C64]) -> C64 {
    let mut k = KahanC::new();
    for &x in xs {
        k.add(x);
    }
    k.value()
}

/// Pairwise (cascade) summation in index order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return kahan_sum(xs);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise summation for complex values.
pub fn pairwise_sum_c(xs: &[C64]) -> C64 {
    if xs.len() <= 16 {
        return kahan_sum_c(xs);
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

/// Deterministic parallel sum of `f(i)` for `i` in `lo..hi`.
///
/// Bitwise reproducible for any thread count.
pub fn par_sum<F>(lo: usize, hi: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if hi <= lo {
        return 0.0;
    }
    let nblocks = (hi - lo).div_ceil(BLOCK);
    let blocks: Vec<f64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let start = lo + b * BLOCK;
            let end = (start + BLOCK).min(hi);
            let mut k = Kahan::new();
            for i in start..end {
                k.add(f(i));
            }
            k.value()
        })
        .collect();
    pairwise_sum(&blocks)
}

/// Deterministic parallel complex sum of `f(i)` for `i` in `lo..hi`.
pub fn par_sum_c<F>(lo: usize, hi: usize, f: F) -> C64
where
    F: Fn(usize) -> C64 + Sync + Send,
{
    if hi <= lo {
        return C64::new(0.0, 0.0);
    }
    let nblocks = (hi - lo).div_ceil(BLOCK);
    let blocks: Vec<C64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let start = lo + b * BLOCK;
            let end = (start + BLOCK).min(hi);
            let mut k = KahanC::new();
            for i in start..end {
                k.add(f(i));
            }
            k.value()
        })
        .collect();
    pairwise_sum_c(&blocks)
}

/// Deterministic parallel map over `lo..hi` (results in index order).
pub fn par_map<T, F>(lo: usize, hi: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (lo..hi).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut xs = vec![1.0];
        xs.extend(std::iter::repeat(1e-16).take(10_000));
        let s = kahan_sum(&xs);
        assert!((s - (1.0 + 1e-12)).abs() < 1e-18);
    }

    #[test]
    fn par_sum_independent_of_threads() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let a = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| par_sum(0, 100_000, f));
        let b = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| par_sum(0, 100_000, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (1..1000).map(|i| 1.0 / (i as f64)).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
    }
}
