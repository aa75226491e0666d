//! Sampled functions on rectangular plates.
//!
//! A [`Plate`] is an axis-aligned box in `R^d` (`d` is 1 or 2) carrying a
//! uniform, cell-centred sample grid: sample `n` sits at
//! `origin + (n + 0.5) * spacing`. A [`SignalGrid`] stores complex samples on a
//! plate in row-major order. Norms are Riemann sums over cells, translations
//! are either circular within the plate or move the plate itself, and
//! convolution is circular.

mod fft;
pub mod io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fft::{fft_forward, fft_inverse};

/// Tolerance used when deciding whether a real shift is a whole number of samples.
const ALIGN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plate {
    origin: Vec<f64>,
    side_lengths: Vec<f64>,
    samples: Vec<usize>,
}

impl Plate {
    pub fn new(origin: Vec<f64>, side_lengths: Vec<f64>, samples: Vec<usize>) -> Result<Self> {
        let d = origin.len();
        if !(1..=2).contains(&d) {
            return Err(Error::InvalidPlate(format!("dimension must be 1 or 2, got {d}")));
        }
        if side_lengths.len() != d || samples.len() != d {
            return Err(Error::InvalidPlate(
                "origin, side lengths and sample counts must have equal length".into(),
            ));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidPlate("origin must be finite".into()));
        }
        if side_lengths.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::InvalidPlate("side lengths must be positive".into()));
        }
        if samples.contains(&0) {
            return Err(Error::InvalidPlate("every axis needs at least one sample".into()));
        }
        Ok(Plate {
            origin,
            side_lengths,
            samples,
        })
    }

    /// The unit box `[0,1]^d` with the given sample counts.
    pub fn unit(samples: &[usize]) -> Result<Self> {
        Plate::new(vec![0.0; samples.len()], vec![1.0; samples.len()], samples.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn side_lengths(&self) -> &[f64] {
        &self.side_lengths
    }

    pub fn samples(&self) -> &[usize] {
        &self.samples
    }

    pub fn sample_count(&self) -> usize {
        self.samples.iter().product()
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.side_lengths
            .iter()
            .zip(&self.samples)
            .map(|(&s, &n)| s / n as f64)
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    /// Lebesgue measure `|D|`.
    pub fn volume(&self) -> f64 {
        self.side_lengths.iter().product()
    }

    pub fn contains_zero(&self) -> bool {
        self.origin
            .iter()
            .zip(&self.side_lengths)
            .all(|(&o, &s)| o <= 0.0 && 0.0 <= o + s)
    }

    /// Physical coordinate of the centre of the cell with multi-index `index`.
    pub fn sample_coordinate(&self, index: &[usize]) -> Vec<f64> {
        self.spacing()
            .iter()
            .zip(&self.origin)
            .zip(index)
            .map(|((&h, &o), &n)| o + (n as f64 + 0.5) * h)
            .collect()
    }

    /// The image `D/S` of the plate under `x -> x/S`, sampled with `samples` cells.
    pub fn shrunk(&self, factor: f64, samples: Vec<usize>) -> Result<Plate> {
        Plate::new(
            self.origin.iter().map(|o| o / factor).collect(),
            self.side_lengths.iter().map(|s| s / factor).collect(),
            samples,
        )
    }

    pub(crate) fn with_origin(&self, origin: Vec<f64>) -> Plate {
        Plate { origin, ..self.clone() }
    }

    /// Express a physical shift as whole sample counts, or fail if it is not aligned.
    pub fn shift_in_samples(&self, shift: &[f64]) -> Result<Vec<i64>> {
        if shift.len() != self.dim() {
            return Err(Error::MisalignedShift(shift.to_vec()));
        }
        shift
            .iter()
            .zip(self.spacing())
            .map(|(&c, h)| {
                let k = c / h;
                let rounded = k.round();
                if (k - rounded).abs() <= ALIGN_TOL * rounded.abs().max(1.0) {
                    Ok(rounded as i64)
                } else {
                    Err(Error::MisalignedShift(shift.to_vec()))
                }
            })
            .collect()
    }

    /// Same box and samples, compared bit for bit.
    pub fn bit_eq(&self, other: &Plate) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        self.samples == other.samples
            && bits(&self.origin) == bits(&other.origin)
            && bits(&self.side_lengths) == bits(&other.side_lengths)
    }
}

/// Frequency-domain array laid out like the DFT of a signal of the same shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    shape: Vec<usize>,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(shape: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != values.len() || shape.is_empty() {
            return Err(Error::ShapeMismatch {
                expected: shape,
                actual: vec![values.len()],
            });
        }
        Ok(Spectrum { shape, values })
    }

    pub fn from_fn(shape: &[usize], f: impl Fn(&[usize]) -> Complex64) -> Self {
        let values = MultiIndex::new(shape).map(|idx| f(&idx)).collect();
        Spectrum {
            shape: shape.to_vec(),
            values,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at the zero frequency.
    pub fn dc(&self) -> Complex64 {
        self.values[0]
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Circular taps of the kernel, obtained by inverse DFT.
    pub fn to_spatial(&self) -> SpatialKernel {
        let mut taps = self.values.clone();
        fft_inverse(&mut taps, &self.shape);
        SpatialKernel {
            shape: self.shape.clone(),
            taps,
        }
    }
}

/// Spatial taps of a circular convolution kernel.
#[derive(Clone, Debug)]
pub struct SpatialKernel {
    shape: Vec<usize>,
    taps: Vec<Complex64>,
}

impl SpatialKernel {
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalGrid {
    plate: Plate,
    values: Vec<Complex64>,
}

impl SignalGrid {
    pub fn new(plate: Plate, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != plate.sample_count() {
            return Err(Error::ShapeMismatch {
                expected: plate.samples().to_vec(),
                actual: vec![values.len()],
            });
        }
        Ok(SignalGrid { plate, values })
    }

    pub fn from_real(plate: Plate, values: &[f64]) -> Result<Self> {
        SignalGrid::new(plate, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(plate: Plate) -> Self {
        let n = plate.sample_count();
        SignalGrid {
            plate,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn constant(plate: Plate, value: f64) -> Self {
        let n = plate.sample_count();
        SignalGrid {
            plate,
            values: vec![Complex64::new(value, 0.0); n],
        }
    }

    pub fn plate(&self) -> &Plate {
        &self.plate
    }

    pub fn shape(&self) -> &[usize] {
        self.plate.samples()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Riemann approximation of the continuous L2 norm.
    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Squared L2 norm, `sum |f|^2 * cell_volume`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.plate.cell_volume()
    }

    /// Largest sample modulus.
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Circular shift by whole samples inside the same plate (the discrete `L_c`).
    pub fn translate_in_plate(&self, offset: &[i64]) -> Result<SignalGrid> {
        let samples = self.plate.samples();
        let in_range =
            offset.len() == samples.len() && offset.iter().zip(samples).all(|(&c, &n)| c.unsigned_abs() < n as u64);
        if !in_range {
            return Err(Error::OffsetOutOfRange {
                offset: offset.to_vec(),
                samples: samples.to_vec(),
            });
        }
        Ok(self.circular_shift(offset))
    }

    pub(crate) fn circular_shift(&self, offset: &[i64]) -> SignalGrid {
        let shape = self.plate.samples();
        let mut out = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for (src, idx) in MultiIndex::new(shape).enumerate() {
            let dst = flat_index_wrapped(shape, &idx, offset);
            out[dst] = self.values[src];
        }
        SignalGrid {
            plate: self.plate.clone(),
            values: out,
        }
    }

    /// Move the function together with its plate by the physical vector `shift` (`T_c`).
    pub fn translate_with_plate(&self, shift: &[f64]) -> Result<SignalGrid> {
        self.plate.shift_in_samples(shift)?;
        let origin: Vec<f64> = self.plate.origin().iter().zip(shift).map(|(o, c)| o + c).collect();
        let plate = self.plate.with_origin(origin);
        if !plate.contains_zero() {
            return Err(Error::OriginOutsidePlate(shift.to_vec()));
        }
        Ok(SignalGrid {
            plate,
            values: self.values.clone(),
        })
    }

    /// Circular convolution by spectral multiplication.
    pub fn convolve(&self, kernel_hat: &Spectrum) -> Result<SignalGrid> {
        self.check_shape(kernel_hat.shape())?;
        let shape = self.plate.samples();
        let mut buf = self.values.clone();
        fft_forward(&mut buf, shape);
        for (b, k) in buf.iter_mut().zip(kernel_hat.values()) {
            *b *= k;
        }
        fft_inverse(&mut buf, shape);
        Ok(SignalGrid {
            plate: self.plate.clone(),
            values: buf,
        })
    }

    /// Circular convolution evaluated as a direct sum over kernel taps.
    ///
    /// Every output sample accumulates its terms in the same tap order, so the
    /// result commutes bit-exactly with circular shifts of the input. Costs
    /// `O(n^2)` in the sample count.
    pub fn convolve_direct(&self, kernel: &SpatialKernel) -> Result<SignalGrid> {
        self.check_shape(kernel.shape())?;
        let shape = self.plate.samples().to_vec();
        let taps: Vec<(Vec<usize>, Complex64)> = MultiIndex::new(&shape).zip(kernel.taps().iter().copied()).collect();
        let values = MultiIndex::new(&shape)
            .map(|n| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, g) in &taps {
                    let src = flat_index_diff(&shape, &n, m);
                    acc += g * self.values[src];
                }
                acc
            })
            .collect();
        Ok(SignalGrid {
            plate: self.plate.clone(),
            values,
        })
    }

    /// Samplewise modulus, stored with zero imaginary part.
    pub fn modulus(&self) -> SignalGrid {
        SignalGrid {
            plate: self.plate.clone(),
            values: self.values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect(),
        }
    }

    /// Samplewise difference of two signals with the same sample grid.
    pub fn sub(&self, other: &SignalGrid) -> Result<SignalGrid> {
        self.check_shape(other.shape())?;
        Ok(SignalGrid {
            plate: self.plate.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, alpha: f64) -> SignalGrid {
        SignalGrid {
            plate: self.plate.clone(),
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }

    /// Values equal bit for bit (plates ignored).
    pub fn values_bit_eq(&self, other: &SignalGrid) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits())
    }

    fn check_shape(&self, other: &[usize]) -> Result<()> {
        if other != self.plate.samples() {
            return Err(Error::ShapeMismatch {
                expected: self.plate.samples().to_vec(),
                actual: other.to_vec(),
            });
        }
        Ok(())
    }
}

/// Row-major iterator over all multi-indices of `shape`.
#[derive(Clone, Debug)]
pub struct MultiIndex {
    shape: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndex {
    pub fn new(shape: &[usize]) -> Self {
        let next = if shape.iter().all(|&n| n > 0) {
            Some(vec![0; shape.len()])
        } else {
            None
        };
        MultiIndex {
            shape: shape.to_vec(),
            next,
        }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for axis in (0..self.shape.len()).rev() {
            succ[axis] += 1;
            if succ[axis] < self.shape[axis] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[axis] = 0;
        }
        Some(current)
    }
}

pub fn flat_index(shape: &[usize], index: &[usize]) -> usize {
    index.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

fn flat_index_wrapped(shape: &[usize], index: &[usize], offset: &[i64]) -> usize {
    index.iter().zip(shape).zip(offset).fold(0, |acc, ((&i, &n), &c)| {
        acc * n + (i as i64 + c).rem_euclid(n as i64) as usize
    })
}

fn flat_index_diff(shape: &[usize], a: &[usize], b: &[usize]) -> usize {
    a.iter()
        .zip(b)
        .zip(shape)
        .fold(0, |acc, ((&x, &y), &n)| acc * n + (x + n - y) % n)
}

/// Signed DFT bin numbers for an axis of length `n`: `0, 1, ..., -2, -1`.
pub fn signed_bin(k: usize, n: usize) -> i64 {
    if 2 * k < n {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Index of the bin holding frequency `-k`.
pub fn mirror_bin(k: usize, n: usize) -> usize {
    (n - k) % n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(values: &[f64], length: f64) -> SignalGrid {
        let plate = Plate::new(vec![0.0], vec![length], vec![values.len()]).unwrap();
        SignalGrid::from_real(plate, values).unwrap()
    }

    #[test]
    fn plate_rejects_degenerate_input() {
        assert!(Plate::new(vec![0.0], vec![0.0], vec![4]).is_err());
        assert!(Plate::new(vec![0.0], vec![1.0], vec![0]).is_err());
        assert!(Plate::new(vec![0.0; 3], vec![1.0; 3], vec![2; 3]).is_err());
        assert!(Plate::new(vec![0.0, 0.0], vec![1.0], vec![2, 2]).is_err());
    }

    #[test]
    fn contains_zero_on_boundary() {
        assert!(Plate::unit(&[4, 4]).unwrap().contains_zero());
        let p = Plate::new(vec![0.25, -1.0], vec![1.0, 2.0], vec![2, 2]).unwrap();
        assert!(!p.contains_zero());
    }

    #[test]
    fn cell_centred_coordinates() {
        let p = Plate::new(vec![-1.0, 0.0], vec![2.0, 1.0], vec![4, 2]).unwrap();
        assert_eq!(p.sample_coordinate(&[0, 0]), vec![-0.75, 0.25]);
        assert_eq!(p.sample_coordinate(&[3, 1]), vec![0.75, 0.75]);
    }

    #[test]
    fn norms() {
        let zero = SignalGrid::zeros(Plate::unit(&[3, 5]).unwrap());
        assert_eq!(zero.l2_norm(), 0.0);
        assert_eq!(zero.linf_norm(), 0.0);

        let one = SignalGrid::constant(Plate::unit(&[4, 4]).unwrap(), 1.0);
        assert_eq!(one.l2_norm(), 1.0);

        assert_eq!(line(&[3.0, 4.0], 2.0).l2_norm(), 5.0);
        assert_eq!(line(&[3.0, -4.0], 1.0).linf_norm(), 4.0);
        assert_eq!(line(&[-2.5; 6], 1.0).linf_norm(), 2.5);
    }

    #[test]
    fn circular_translation() {
        let f = line(&[1.0, 2.0, 3.0, 4.0], 1.0);
        assert_eq!(f.translate_in_plate(&[0]).unwrap(), f);
        assert_eq!(
            f.translate_in_plate(&[1]).unwrap().real_parts(),
            vec![4.0, 1.0, 2.0, 3.0]
        );
        let back = f.translate_in_plate(&[3]).unwrap().translate_in_plate(&[-3]).unwrap();
        assert_eq!(back, f);
        assert!(f.translate_in_plate(&[4]).is_err());
        assert!(f.translate_in_plate(&[-4]).is_err());
    }

    #[test]
    fn plate_translation_moves_metadata_only() {
        let plate = Plate::new(vec![-1.0, -1.0], vec![2.0, 2.0], vec![8, 8]).unwrap();
        let vals: Vec<f64> = (0..64).map(|i| (i as f64).sin()).collect();
        let f = SignalGrid::from_real(plate, &vals).unwrap();

        let same = f.translate_with_plate(&[0.0, 0.0]).unwrap();
        assert_eq!(same, f);

        let moved = f.translate_with_plate(&[0.5, 0.0]).unwrap();
        assert_eq!(moved.plate().origin(), &[-0.5, -1.0]);
        assert!(moved.values_bit_eq(&f));
        assert_eq!(moved.l2_norm(), f.l2_norm());

        assert!(matches!(
            f.translate_with_plate(&[0.3, 0.0]),
            Err(Error::MisalignedShift(_))
        ));
        assert!(matches!(
            f.translate_with_plate(&[1.5, 0.0]),
            Err(Error::OriginOutsidePlate(_))
        ));
    }

    #[test]
    fn convolve_identity_and_shift() {
        let plate = Plate::unit(&[4, 6]).unwrap();
        let vals: Vec<f64> = (0..24).map(|i| (i * i % 7) as f64).collect();
        let f = SignalGrid::from_real(plate, &vals).unwrap();

        let dirac = Spectrum::from_fn(&[4, 6], |_| Complex64::new(1.0, 0.0));
        let g = f.convolve(&dirac).unwrap();
        for (a, b) in g.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-12);
        }

        // e^{-i w.k} shifts by k samples
        let k = [1usize, 2usize];
        let phase = Spectrum::from_fn(&[4, 6], |idx| {
            let t =
                2.0 * std::f64::consts::PI * (idx[0] as f64 * k[0] as f64 / 4.0 + idx[1] as f64 * k[1] as f64 / 6.0);
            Complex64::from_polar(1.0, -t)
        });
        let shifted = f.convolve(&phase).unwrap();
        let expected = f.translate_in_plate(&[1, 2]).unwrap();
        for (a, b) in shifted.values().iter().zip(expected.values()) {
            assert!((a - b).norm() < 1e-12);
        }

        let wrong = Spectrum::from_fn(&[6, 4], |_| Complex64::new(1.0, 0.0));
        assert!(matches!(f.convolve(&wrong), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn multi_index_is_row_major() {
        let all: Vec<_> = MultiIndex::new(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[3], vec![1, 0]);
        for (i, idx) in all.iter().enumerate() {
            assert_eq!(flat_index(&[2, 3], idx), i);
        }
    }

    #[test]
    fn bins() {
        assert_eq!((0..4).map(|k| signed_bin(k, 4)).collect::<Vec<_>>(), vec![0, 1, -2, -1]);
        assert_eq!(
            (0..5).map(|k| signed_bin(k, 5)).collect::<Vec<_>>(),
            vec![0, 1, 2, -2, -1]
        );
        assert_eq!(mirror_bin(0, 4), 0);
        assert_eq!(mirror_bin(1, 4), 3);
        assert_eq!(mirror_bin(2, 4), 2);
    }
}
