//! Extend a Maass data file to more Hecke eigenvalues.
//!
//! usage: maass_extend <in> <out> <N>
//!
//! The stored coefficients determine u exactly on the fundamental domain; for a
//! height Y ≪ 1 the Fourier coefficients of x ↦ u(x + iY) are computed from values at
//! the pulled-back points, and λ(n) is recovered by least squares over a geometric
//! ladder of heights (so zeros of K_{it}(2πnY) never dominate). The output is checked
//! against the input coefficients and against the Hecke relations.

use sslab_core::modforms::maass::{maass_parse, maass_write, Parity};
use sslab_core::specfun::bessel_k;
use sslab_core::{PrecisionConfig, C64};
use std::f64::consts::PI;

fn pullback(mut z: C64) -> C64 {
    loop {
        z.re -= z.re.round();
        if z.norm_sqr() < 1.0 - 1e-15 {
            z = -z.inv();
        } else {
            return z;
        }
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() != 4 {
        eprintln!("usage: maass_extend <in> <out> <N>");
        std::process::exit(2);
    }
    let cfg = PrecisionConfig::default();
    let data = maass_parse(&std::fs::read_to_string(&args[1]).unwrap()).unwrap();
    let n_max: usize = args[3].parse().unwrap();
    let t = data.t;
    let mu = C64::new(0.0, t);
    let mut heights = Vec::new();
    let mut y = 0.8;
    let y_min = 0.4 * t / (2.0 * PI * n_max as f64);
    while y > y_min {
        heights.push(y);
        y /= 1.25;
    }
    let mut num = vec![0.0f64; n_max + 1];
    let mut den = vec![0.0f64; n_max + 1];
    let mut gmax = vec![0.0f64; n_max + 1];
    let mut rows: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for &y in &heights {
        let n_present = ((t + 45.0) / (2.0 * PI * y)).ceil() as usize;
        let p = 2 * n_present.max(n_max) + 64;
        let xs: Vec<f64> = (0..p).map(|i| (i as f64 + 0.5) / p as f64).collect();
        let vals: Vec<f64> = xs
            .iter()
            .map(|&x| {
                // bessel_k can fail to certify at isolated arguments; nudge the point
                // (the shift is far below the DFT resolution)
                let mut dx = 0.0;
                loop {
                    match data.raw_eval(pullback(C64::new(x + dx, y)), &cfg) {
                        Ok(v) => return v,
                        Err(_) if dx < 1e-9 => dx = if dx == 0.0 { 1e-13 } else { dx * 10.0 },
                        Err(e) => panic!("{e:?} at x = {x}, y = {y}, pullback {}", pullback(C64::new(x, y))),
                    }
                }
            })
            .collect();
        let mut f = vec![0.0f64; n_max + 1];
        let mut g = vec![0.0f64; n_max + 1];
        for n in 1..=n_max {
            let mut acc = 0.0;
            let step = C64::from_polar(1.0, 2.0 * PI * n as f64 / p as f64);
            let mut rot = C64::from_polar(1.0, PI * n as f64 / p as f64);
            for (i, v) in vals.iter().enumerate() {
                if i % 64 == 0 {
                    rot = C64::from_polar(1.0, 2.0 * PI * n as f64 * xs[i]);
                }
                acc += v * match data.parity {
                    Parity::Even => rot.re,
                    Parity::Odd => rot.im,
                };
                rot *= step;
            }
            f[n] = 2.0 * acc / p as f64;
            g[n] = 2.0 * y.sqrt() * bessel_k(mu, 2.0 * PI * n as f64 * y, &cfg).unwrap().re;
            gmax[n] = gmax[n].max(g[n].abs());
        }
        rows.push((f, g));
        eprintln!("Y = {y:.5}: {p} points");
    }
    for (f, g) in &rows {
        for n in 1..=n_max {
            if g[n].abs() >= 0.2 * gmax[n] {
                num[n] += f[n] * g[n];
                den[n] += g[n] * g[n];
            }
        }
    }
    let lam: Vec<f64> = (1..=n_max).map(|n| num[n] / den[n]).collect();
    let mut dev: f64 = 0.0;
    for (i, &l) in data.lambda.iter().enumerate() {
        dev = dev.max((l - lam[i]).abs());
    }
    eprintln!("max deviation from input coefficients: {dev:.2e}");
    let mut out = data.clone();
    out.lambda = lam;
    out.lambda[..data.lambda.len()].copy_from_slice(&data.lambda);
    let mut hecke: f64 = 0.0;
    for m in 2..=n_max {
        for n in m..=n_max / m {
            let g = num_integer_gcd(m, n);
            let rhs: f64 = (1..=g).filter(|d| g % d == 0).map(|d| out.lambda[m * n / (d * d) - 1]).sum();
            hecke = hecke.max((out.lambda[m - 1] * out.lambda[n - 1] - rhs).abs() / (1.0 + rhs.abs()));
        }
    }
    eprintln!("max Hecke defect: {hecke:.2e}");
    std::fs::write(&args[2], maass_write(&out)).unwrap();
}

fn num_integer_gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}
