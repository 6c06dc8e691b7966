//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the code paths it is used to check.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Box-Muller normal draws, independent of the library's sampler.
pub fn normals(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let u: f64 = rng.random_range(f64::EPSILON..1.0);
            let v: f64 = rng.random();
            (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
        })
        .collect()
}

pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// O(N²) direct DFT with kernel exp(-2πi nk/N).
pub fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| (0..n).map(|m| x[m] * Complex64::from_polar(1.0, -2.0 * PI * ((m * k) % n) as f64 / n as f64)).sum())
        .collect()
}

/// Nested-loop spectrum: enumerate every (k_1, …, k_{q-1}) with k_1 most
/// significant and multiply the q DFT coefficients directly.
pub fn spectrum_oracle(x: &[Complex64], q: usize) -> Vec<Complex64> {
    let n = x.len();
    let xhat = direct_dft(x);
    let len = n.pow(q as u32 - 1);
    let mut out = Vec::with_capacity(len);
    for flat in 0..len {
        let mut rest = flat;
        let mut idx = vec![0usize; q - 1];
        for d in (0..q - 1).rev() {
            idx[d] = rest % n;
            rest /= n;
        }
        let sum: usize = idx.iter().sum();
        let mut prod = xhat[(n - sum % n) % n];
        for &k in &idx {
            prod *= xhat[k];
        }
        out.push(prod);
    }
    out
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn cnorm2(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense K × R product, one row at a time.
pub fn dense_apply(rows: &[Vec<Complex64>], m: &[Complex64]) -> Vec<Complex64> {
    rows.iter().map(|row| row.iter().zip(m).map(|(a, b)| a * b).sum()).collect()
}

/// Central differences of a vector-valued map along each coordinate.
pub fn central_difference<F>(x: &[f64], h: f64, f: F) -> Vec<Vec<Complex64>>
where
    F: Fn(&[f64]) -> Vec<Complex64>,
{
    (0..x.len())
        .map(|i| {
            let mut plus = x.to_vec();
            let mut minus = x.to_vec();
            plus[i] += h;
            minus[i] -= h;
            let fp = f(&plus);
            let fm = f(&minus);
            fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        })
        .collect()
}

/// Exhaustive aligned error over shifts and the given signs.
pub fn brute_aligned_error(estimate: &[f64], truth: &[f64], signs: &[f64]) -> f64 {
    let n = truth.len();
    let mut best = f64::INFINITY;
    for s in 0..n {
        let shifted: Vec<f64> = (0..n).map(|i| estimate[(i + n - s) % n]).collect();
        for &z in signs {
            let d: Vec<f64> = shifted.iter().zip(truth).map(|(a, b)| z * a - b).collect();
            best = best.min(norm2(&d) / norm2(truth));
        }
    }
    best
}
