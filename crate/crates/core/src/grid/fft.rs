use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized forward DFT of a row-major array.
pub fn fft_forward(data: &mut [Complex64], shape: &[usize]) {
    transform(data, shape, FftDirection::Forward);
}

/// In-place inverse DFT, normalized by `1/len`.
pub fn fft_inverse(data: &mut [Complex64], shape: &[usize]) {
    transform(data, shape, FftDirection::Inverse);
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

fn transform(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    debug_assert_eq!(data.len(), shape.iter().product::<usize>());
    for axis in 0..shape.len() {
        let n = shape[axis];
        if n == 1 {
            continue;
        }
        let stride: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));

        if stride == 1 {
            fft.process(data);
            continue;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for o in 0..outer {
            let base = o * n * stride;
            for s in 0..stride {
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride + s];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride + s] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], shape: &[usize]) -> Vec<Complex64> {
        let (n0, n1) = (shape[0], shape[1]);
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for k0 in 0..n0 {
            for k1 in 0..n1 {
                let mut acc = Complex64::new(0.0, 0.0);
                for x0 in 0..n0 {
                    for x1 in 0..n1 {
                        let t =
                            -2.0 * std::f64::consts::PI * ((k0 * x0) as f64 / n0 as f64 + (k1 * x1) as f64 / n1 as f64);
                        acc += data[x0 * n1 + x1] * Complex64::from_polar(1.0, t);
                    }
                }
                out[k0 * n1 + k1] = acc;
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_and_inverts() {
        let shape = [3, 5];
        let data: Vec<Complex64> = (0..15)
            .map(|i| Complex64::new((i as f64 * 0.7).cos(), (i as f64 * 1.3).sin()))
            .collect();
        let mut buf = data.clone();
        fft_forward(&mut buf, &shape);
        for (a, b) in buf.iter().zip(naive_dft(&data, &shape)) {
            assert!((a - b).norm() < 1e-12);
        }
        fft_inverse(&mut buf, &shape);
        for (a, b) in buf.iter().zip(&data) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
