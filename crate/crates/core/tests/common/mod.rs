//! Reference implementations written independently of the library code.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

/// Row-major multi-indices of a 2-D shape.
pub fn indices_2d(rows: usize, cols: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..rows).flat_map(move |r| (0..cols).map(move |c| (r, c)))
}

/// `g[m] = 1/N sum_k ghat[k] exp(2 pi i k.m / N)` by direct summation.
pub fn naive_inverse_dft_2d(spectrum: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let n = (rows * cols) as f64;
    indices_2d(rows, cols)
        .map(|(m0, m1)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k0, k1) in indices_2d(rows, cols) {
                let phase = 2.0 * PI * ((k0 * m0) as f64 / rows as f64 + (k1 * m1) as f64 / cols as f64);
                acc += spectrum[k0 * cols + k1] * Complex64::from_polar(1.0, phase);
            }
            acc / n
        })
        .collect()
}

/// `(f * g)[n] = sum_m g[m] f[n - m]` with periodic indices.
pub fn circular_convolution_2d(f: &[Complex64], g: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    indices_2d(rows, cols)
        .map(|(n0, n1)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m0, m1) in indices_2d(rows, cols) {
                let s0 = (n0 + rows - m0) % rows;
                let s1 = (n1 + cols - m1) % cols;
                acc += g[m0 * cols + m1] * f[s0 * cols + s1];
            }
            acc
        })
        .collect()
}

/// Maximum modulus over each `block x block` tile, tiles in row-major order.
pub fn block_max_2d(f: &[Complex64], rows: usize, cols: usize, block: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for br in 0..rows / block {
        for bc in 0..cols / block {
            let mut best = 0.0f64;
            for r in br * block..(br + 1) * block {
                for c in bc * block..(bc + 1) * block {
                    let v = f[r * cols + c].norm();
                    if v > best {
                        best = v;
                    }
                }
            }
            out.push(best);
        }
    }
    out
}

pub fn random_complex<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `n` choose `k`.
pub fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}
