//! Morlet wavelet banks and the Gaussian low-pass, built on the DFT grid.
//!
//! Filters are specified in *reference units*: frequencies are radians per
//! sample of the root grid. A bank realized on a grid whose spacing is `rho`
//! times the reference spacing (per axis) evaluates the same continuous filter
//! at `omega_ref = omega_sample / rho`, so pooled grids see the same physical
//! filters. Every filter is periodized over neighbouring aliases.
//!
//! Scale index `j` runs over `0..J` with `j = 0` the finest wavelet; it maps
//! to the signed scale `-j > -J`. Rotation `r` in `0..L` samples the
//! orientation `pi * r / L` over half a turn, one per element of `G+`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{mirror_bin, signed_bin, MultiIndex, Spectrum};

/// Aliases summed on each side when periodizing a filter.
const PERIODS: i64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FilterIndex {
    pub j: u32,
    pub r: u32,
}

impl FilterIndex {
    pub fn new(j: u32, r: u32) -> Self {
        FilterIndex { j, r }
    }

    /// The scale in the `j > -J` convention (finer wavelets have larger scale).
    pub fn signed_scale(&self) -> i32 {
        -(self.j as i32)
    }
}

/// How wavelet gains are set after the Morlet shapes are built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Peak-one Gabor envelopes, exactly as constructed.
    Raw,
    /// Each frequency bin of every wavelet is rescaled by the common factor that
    /// makes `|phi|^2 + 1/2 sum_l (|psi_l(w)|^2 + |psi_l(-w)|^2) = 1`.
    #[default]
    Tight,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorletParams {
    pub sigma0: f64,
    pub xi0: f64,
    /// Aspect ratio of the envelope; `None` means `4/L`.
    pub slant: Option<f64>,
    pub normalization: Normalization,
}

impl Default for MorletParams {
    fn default() -> Self {
        MorletParams {
            sigma0: 0.8,
            xi0: 3.0 * PI / 4.0,
            slant: None,
            normalization: Normalization::Tight,
        }
    }
}

impl MorletParams {
    pub fn slant_for(&self, rotations: u32) -> f64 {
        self.slant.unwrap_or(4.0 / rotations as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterDesign {
    Morlet(MorletParams),
    /// Ideal band indicators that tile the frequency plane exactly.
    ShannonPartition,
    /// Arrays supplied by the caller; cannot be realized on other grids.
    Custom,
}

#[derive(Clone, Debug)]
pub struct FilterBank {
    scales: u32,
    rotations: u32,
    shape: Vec<usize>,
    spacing_ratio: Vec<f64>,
    design: FilterDesign,
    psi: Vec<(FilterIndex, Spectrum)>,
    phi: Spectrum,
}

/// Build the Morlet bank with `J * L` wavelets on `shape`.
pub fn build_morlet_bank(scales: u32, rotations: u32, shape: &[usize], params: MorletParams) -> Result<FilterBank> {
    check_bank_args(scales, rotations, shape)?;
    if !(params.sigma0 > 0.0 && params.xi0 >= 0.0 && params.slant_for(rotations) > 0.0) {
        return Err(Error::InvalidBank(format!("bad Morlet parameters {params:?}")));
    }
    Ok(realize_morlet(
        scales,
        rotations,
        shape,
        &vec![1.0; shape.len()],
        params,
    ))
}

/// Bank of ideal indicators whose Littlewood-Paley sum is identically one.
pub fn shannon_partition_bank(scales: u32, rotations: u32, shape: &[usize]) -> Result<FilterBank> {
    check_bank_args(scales, rotations, shape)?;
    Ok(realize_shannon(scales, rotations, shape, &vec![1.0; shape.len()]))
}

fn check_bank_args(scales: u32, rotations: u32, shape: &[usize]) -> Result<()> {
    if scales < 1 || rotations < 1 {
        return Err(Error::InvalidBank("J and L must be at least 1".into()));
    }
    if !(1..=2).contains(&shape.len()) {
        return Err(Error::InvalidBank("grid must be 1- or 2-dimensional".into()));
    }
    if shape.len() == 1 && rotations != 1 {
        return Err(Error::InvalidBank("1-D banks have a single rotation".into()));
    }
    let decimation = 1usize << scales;
    if shape.iter().any(|&n| n == 0 || n % decimation != 0) {
        return Err(Error::Indivisible {
            shape: shape.to_vec(),
            divisor: format!("2^J = {decimation}"),
        });
    }
    Ok(())
}

impl FilterBank {
    /// Assemble a bank from explicit arrays.
    pub fn from_parts(
        scales: u32,
        rotations: u32,
        psi: Vec<(FilterIndex, Spectrum)>,
        phi: Spectrum,
    ) -> Result<FilterBank> {
        let shape = phi.shape().to_vec();
        for (idx, s) in &psi {
            if s.shape() != shape.as_slice() {
                return Err(Error::ShapeMismatch {
                    expected: shape,
                    actual: s.shape().to_vec(),
                });
            }
            if idx.j >= scales || idx.r >= rotations {
                return Err(Error::InvalidBank(format!("index {idx:?} outside J x L")));
            }
        }
        if phi
            .values()
            .iter()
            .chain(psi.iter().flat_map(|(_, s)| s.values()))
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidBank("filters must be finite".into()));
        }
        let mut psi = psi;
        psi.sort_by_key(|(idx, _)| *idx);
        Ok(FilterBank {
            scales,
            rotations,
            spacing_ratio: vec![1.0; shape.len()],
            shape,
            design: FilterDesign::Custom,
            psi,
            phi,
        })
    }

    pub fn scales(&self) -> u32 {
        self.scales
    }

    pub fn rotations(&self) -> u32 {
        self.rotations
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn spacing_ratio(&self) -> &[f64] {
        &self.spacing_ratio
    }

    pub fn design(&self) -> &FilterDesign {
        &self.design
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// Wavelet indices in `(j, r)` order.
    pub fn indices(&self) -> impl Iterator<Item = FilterIndex> + '_ {
        self.psi.iter().map(|(idx, _)| *idx)
    }

    pub fn wavelets(&self) -> &[(FilterIndex, Spectrum)] {
        &self.psi
    }

    pub fn psi(&self, idx: FilterIndex) -> Option<&Spectrum> {
        self.psi
            .binary_search_by_key(&idx, |(i, _)| *i)
            .ok()
            .map(|k| &self.psi[k].1)
    }

    pub fn phi(&self) -> &Spectrum {
        &self.phi
    }

    /// The same filter design evaluated on another grid.
    pub fn realize(&self, shape: &[usize], spacing_ratio: &[f64]) -> Result<FilterBank> {
        if shape == self.shape.as_slice() && spacing_ratio == self.spacing_ratio.as_slice() {
            return Ok(self.clone());
        }
        if shape.len() != self.dim() || spacing_ratio.len() != self.dim() {
            return Err(Error::NoLowPass(shape.to_vec()));
        }
        match self.design {
            FilterDesign::Morlet(p) => Ok(realize_morlet(self.scales, self.rotations, shape, spacing_ratio, p)),
            FilterDesign::ShannonPartition => Ok(realize_shannon(self.scales, self.rotations, shape, spacing_ratio)),
            FilterDesign::Custom => Err(Error::NoLowPass(shape.to_vec())),
        }
    }

    /// Reference-unit frequency vector of bin `idx`, using the signed representative.
    pub fn frequency(&self, idx: &[usize]) -> Vec<f64> {
        frequency(&self.shape, &self.spacing_ratio, idx)
    }

    /// `1/2 sum_l (|psi_l(w)|^2 + |psi_l(-w)|^2)` on every bin.
    pub fn littlewood_paley(&self) -> Vec<f64> {
        symmetrized_energy(&self.shape, self.psi.iter().map(|(_, s)| s))
    }
}

fn frequency(shape: &[usize], rho: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter()
        .zip(shape)
        .zip(rho)
        .map(|((&k, &n), &r)| 2.0 * PI * signed_bin(k, n) as f64 / n as f64 / r)
        .collect()
}

fn mirror_flat(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter()
        .zip(shape)
        .fold(0, |acc, (&k, &n)| acc * n + mirror_bin(k, n))
}

fn symmetrized_energy<'a>(shape: &[usize], filters: impl Iterator<Item = &'a Spectrum>) -> Vec<f64> {
    let n: usize = shape.iter().product();
    let mirrors: Vec<usize> = MultiIndex::new(shape).map(|i| mirror_flat(shape, &i)).collect();
    let mut acc = vec![0.0; n];
    for s in filters {
        let v = s.values();
        for (k, a) in acc.iter_mut().enumerate() {
            *a += 0.5 * (v[k].norm_sqr() + v[mirrors[k]].norm_sqr());
        }
    }
    acc
}

/// Sum of `g` over the alias lattice `omega + 2 pi a / rho`.
fn periodized(omega: &[f64], rho: &[f64], g: &impl Fn(&[f64]) -> f64) -> f64 {
    let mut total = 0.0;
    let mut shifted = omega.to_vec();
    match omega.len() {
        1 => {
            for a in -PERIODS..=PERIODS {
                shifted[0] = omega[0] + 2.0 * PI * a as f64 / rho[0];
                total += g(&shifted);
            }
        }
        _ => {
            for a in -PERIODS..=PERIODS {
                for b in -PERIODS..=PERIODS {
                    shifted[0] = omega[0] + 2.0 * PI * a as f64 / rho[0];
                    shifted[1] = omega[1] + 2.0 * PI * b as f64 / rho[1];
                    total += g(&shifted);
                }
            }
        }
    }
    total
}

/// Gabor envelope `exp(-sigma^2/2 * |A R^T (w - xi e_theta)|^2)` with aspect `slant`.
fn gabor_hat(omega: &[f64], sigma: f64, xi: f64, theta: f64, slant: f64) -> f64 {
    let s2 = sigma * sigma;
    if omega.len() == 1 {
        let a = omega[0] - xi;
        return (-0.5 * s2 * a * a).exp();
    }
    let (sin, cos) = theta.sin_cos();
    let d0 = omega[0] - xi * cos;
    let d1 = omega[1] - xi * sin;
    let along = d0 * cos + d1 * sin;
    let across = -d0 * sin + d1 * cos;
    (-0.5 * s2 * (along * along + across * across / (slant * slant))).exp()
}

fn gaussian_hat(omega: &[f64], sigma: f64) -> f64 {
    let r2: f64 = omega.iter().map(|w| w * w).sum();
    (-0.5 * sigma * sigma * r2).exp()
}

fn real_spectrum(shape: &[usize], rho: &[f64], g: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    MultiIndex::new(shape)
        .map(|idx| periodized(&frequency(shape, rho, &idx), rho, &g))
        .collect()
}

fn to_spectrum(shape: &[usize], values: Vec<f64>) -> Spectrum {
    Spectrum::new(
        shape.to_vec(),
        values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
    .expect("length matches shape")
}

fn realize_morlet(scales: u32, rotations: u32, shape: &[usize], rho: &[f64], params: MorletParams) -> FilterBank {
    let slant = params.slant_for(rotations);
    let mut wavelets: Vec<(FilterIndex, Vec<f64>)> = Vec::with_capacity((scales * rotations) as usize);
    for j in 0..scales {
        let sigma = params.sigma0 * f64::from(1u32 << j);
        let xi = params.xi0 / f64::from(1u32 << j);
        for r in 0..rotations {
            let theta = PI * f64::from(r) / f64::from(rotations);
            let wave = real_spectrum(shape, rho, |w| gabor_hat(w, sigma, xi, theta, slant));
            let envelope = real_spectrum(shape, rho, |w| gabor_hat(w, sigma, 0.0, theta, slant));
            let kappa = wave[0] / envelope[0];
            let mut psi: Vec<f64> = wave.iter().zip(&envelope).map(|(w, e)| w - kappa * e).collect();
            psi[0] = 0.0;
            wavelets.push((FilterIndex::new(j, r), psi));
        }
    }

    let sigma_low = params.sigma0 * f64::from(1u32 << scales);
    let phi = real_spectrum(shape, rho, |w| gaussian_hat(w, sigma_low));

    if params.normalization == Normalization::Tight {
        let spectra: Vec<Spectrum> = wavelets.iter().map(|(_, v)| to_spectrum(shape, v.clone())).collect();
        let lp = symmetrized_energy(shape, spectra.iter());
        let gain: Vec<f64> = lp
            .iter()
            .zip(&phi)
            .enumerate()
            .map(|(k, (&w, &p))| {
                let target = (1.0 - p * p).max(0.0);
                if k == 0 || w <= 0.0 {
                    0.0
                } else {
                    (target / w).sqrt()
                }
            })
            .collect();
        for (_, psi) in wavelets.iter_mut() {
            for (v, g) in psi.iter_mut().zip(&gain) {
                *v *= g;
            }
        }
    }

    FilterBank {
        scales,
        rotations,
        shape: shape.to_vec(),
        spacing_ratio: rho.to_vec(),
        design: FilterDesign::Morlet(params),
        psi: wavelets
            .into_iter()
            .map(|(idx, v)| (idx, to_spectrum(shape, v)))
            .collect(),
        phi: to_spectrum(shape, phi),
    }
}

fn realize_shannon(scales: u32, rotations: u32, shape: &[usize], rho: &[f64]) -> FilterBank {
    let cutoff = |j: u32| PI / f64::from(1u32 << j);
    let mut psi: Vec<Vec<f64>> = vec![vec![0.0; shape.iter().product()]; (scales * rotations) as usize];
    let mut phi = vec![0.0; shape.iter().product()];

    for (k, idx) in MultiIndex::new(shape).enumerate() {
        let omega = frequency(shape, rho, &idx);
        let radius = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
        if radius < cutoff(scales) {
            phi[k] = 1.0;
            continue;
        }
        let j = (0..scales).find(|&j| radius >= cutoff(j + 1)).unwrap_or(scales - 1);
        let mirror = mirror_flat(shape, &idx);
        let upper = |w: &[f64]| {
            if w.len() == 1 {
                w[0] > 0.0
            } else {
                let angle = w[1].atan2(w[0]);
                (0.0..PI).contains(&angle)
            }
        };
        let mirror_idx: Vec<usize> = idx.iter().zip(shape).map(|(&i, &n)| mirror_bin(i, n)).collect();
        let (here, there) = (upper(&omega), upper(&frequency(shape, rho, &mirror_idx)));
        // Nyquist rows alias both members of a pair into the same half-plane
        let upper_half = if here != there { here } else { k < mirror };
        let orientation = if omega.len() == 1 {
            0.0
        } else {
            omega[1].atan2(omega[0]).rem_euclid(PI)
        };
        let self_mirror = mirror == k;
        let r = ((orientation / (PI / f64::from(rotations))) as u32).min(rotations - 1);
        let amplitude = if self_mirror {
            1.0
        } else if upper_half {
            std::f64::consts::SQRT_2
        } else {
            0.0
        };
        psi[(j * rotations + r) as usize][k] = amplitude;
    }

    FilterBank {
        scales,
        rotations,
        shape: shape.to_vec(),
        spacing_ratio: rho.to_vec(),
        design: FilterDesign::ShannonPartition,
        psi: psi
            .into_iter()
            .enumerate()
            .map(|(n, v)| {
                let n = n as u32;
                (FilterIndex::new(n / rotations, n % rotations), to_spectrum(shape, v))
            })
            .collect(),
        phi: to_spectrum(shape, phi),
    }
}

/// Worst-case deviation from the exact energy identity over all frequency bins.
pub fn frame_defect(bank: &FilterBank) -> f64 {
    bank.littlewood_paley()
        .iter()
        .zip(bank.phi().values())
        .map(|(w, p)| (1.0 - (p.norm_sqr() + w)).abs())
        .fold(0.0, f64::max)
}

/// Tight numerical constant `max |phi(w)| |w|`, with `w` in reference units.
pub fn translation_lipschitz_constant(bank: &FilterBank) -> f64 {
    MultiIndex::new(bank.shape())
        .zip(bank.phi().values())
        .map(|(idx, p)| {
            let radius = bank.frequency(&idx).iter().map(|w| w * w).sum::<f64>().sqrt();
            p.norm() * radius
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bank_size_is_j_times_l() {
        let bank = build_morlet_bank(2, 2, &[16, 16], MorletParams::default()).unwrap();
        assert_eq!(bank.len(), 4);
        let idx: Vec<_> = bank.indices().collect();
        assert_eq!(
            idx,
            vec![
                FilterIndex::new(0, 0),
                FilterIndex::new(0, 1),
                FilterIndex::new(1, 0),
                FilterIndex::new(1, 1)
            ]
        );
        assert_eq!(FilterIndex::new(1, 0).signed_scale(), -1);
    }

    #[test]
    fn rejects_indivisible_grid_and_bad_counts() {
        assert!(matches!(
            build_morlet_bank(3, 4, &[20, 16], MorletParams::default()),
            Err(Error::Indivisible { .. })
        ));
        assert!(build_morlet_bank(0, 4, &[16, 16], MorletParams::default()).is_err());
        assert!(build_morlet_bank(2, 0, &[16, 16], MorletParams::default()).is_err());
        assert!(build_morlet_bank(2, 2, &[16], MorletParams::default()).is_err());
    }

    #[test]
    fn wavelets_have_zero_mean() {
        for norm in [Normalization::Raw, Normalization::Tight] {
            let params = MorletParams {
                normalization: norm,
                ..Default::default()
            };
            let bank = build_morlet_bank(3, 4, &[32, 32], params).unwrap();
            for (_, s) in bank.wavelets() {
                assert!(s.dc().norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn low_pass_dc_is_spatial_integral() {
        let bank = build_morlet_bank(2, 2, &[16, 16], MorletParams::default()).unwrap();
        let taps = bank.phi().to_spatial();
        let integral: Complex64 = taps.taps().iter().sum();
        assert!((integral - bank.phi().dc()).norm() < 1e-12);
        assert_eq!(bank.phi().dc().im, 0.0);
        assert!(bank.phi().dc().re > 0.0);
    }

    #[test]
    fn rebuild_is_bit_identical() {
        let a = build_morlet_bank(2, 3, &[16, 8], MorletParams::default()).unwrap();
        let b = build_morlet_bank(2, 3, &[16, 8], MorletParams::default()).unwrap();
        for ((_, x), (_, y)) in a.wavelets().iter().zip(b.wavelets()) {
            assert_eq!(x, y);
        }
        assert_eq!(a.phi(), b.phi());
    }

    #[test]
    fn shannon_partition_is_exact() {
        for (shape, l) in [(vec![32, 32], 4), (vec![16, 8], 3), (vec![64], 1)] {
            let bank = shannon_partition_bank(3, l, &shape).unwrap();
            assert!(frame_defect(&bank) <= 1e-12, "{shape:?}");
        }
    }

    #[test]
    fn defect_bounded_below_by_dc_mismatch() {
        let shape = [8, 8];
        let bank = build_morlet_bank(2, 2, &shape, MorletParams::default()).unwrap();
        let psi = bank.wavelets().to_vec();
        let phi = Spectrum::from_fn(&shape, |idx| {
            Complex64::new(if idx.iter().all(|&k| k == 0) { 0.7 } else { 1.0 }, 0.0)
        });
        let custom = FilterBank::from_parts(2, 2, psi, phi).unwrap();
        assert!(frame_defect(&custom) >= (1.0f64 - 0.49).abs());
    }

    #[test]
    fn b_of_zero_low_pass_is_zero() {
        let shape = [8, 8];
        let phi = Spectrum::from_fn(&shape, |_| Complex64::new(0.0, 0.0));
        let bank = FilterBank::from_parts(1, 1, vec![], phi).unwrap();
        assert_eq!(translation_lipschitz_constant(&bank), 0.0);
    }

    #[test]
    fn b_is_invariant_under_conjugation() {
        let bank = build_morlet_bank(2, 2, &[16, 16], MorletParams::default()).unwrap();
        let shape = bank.shape().to_vec();
        let conj = Spectrum::new(
            shape.clone(),
            bank.phi()
                .values()
                .iter()
                .map(|v| v.conj() * Complex64::new(0.0, 1.0))
                .collect(),
        )
        .unwrap();
        let other = FilterBank::from_parts(2, 2, bank.wavelets().to_vec(), conj).unwrap();
        assert_eq!(
            translation_lipschitz_constant(&bank),
            translation_lipschitz_constant(&other)
        );
    }

    #[test]
    fn realize_on_same_grid_is_identity() {
        let bank = build_morlet_bank(2, 2, &[16, 16], MorletParams::default()).unwrap();
        let again = bank.realize(&[16, 16], &[1.0, 1.0]).unwrap();
        assert_eq!(again.phi(), bank.phi());
        let custom = FilterBank::from_parts(1, 1, vec![], bank.phi().clone()).unwrap();
        assert!(matches!(custom.realize(&[8, 8], &[1.0, 1.0]), Err(Error::NoLowPass(_))));
    }
}
