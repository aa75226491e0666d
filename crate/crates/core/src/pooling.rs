//! Continuous max-pooling on plates.
//!
//! A plate `D` is split into `N` congruent axis-aligned sub-plates `D(i)`.
//! Pooling with factor `S` replaces `f` on each sub-plate by `max |f|` over it
//! and rescales the plate to `D/S`. The output grid carries one sample per
//! sub-plate, so the piecewise-constant result is represented exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{flat_index, MultiIndex, Plate, SignalGrid};

#[derive(Clone, Debug, PartialEq)]
pub struct PlatePartition {
    parent: Plate,
    blocks_per_axis: Vec<usize>,
}

impl PlatePartition {
    pub fn parent(&self) -> &Plate {
        &self.parent
    }

    pub fn blocks_per_axis(&self) -> &[usize] {
        &self.blocks_per_axis
    }

    /// Number of sub-plates `N`.
    pub fn count(&self) -> usize {
        self.blocks_per_axis.iter().product()
    }

    /// Samples of the parent grid inside each sub-plate, per axis.
    pub fn block_samples(&self) -> Vec<usize> {
        self.parent
            .samples()
            .iter()
            .zip(&self.blocks_per_axis)
            .map(|(n, b)| n / b)
            .collect()
    }

    /// The sub-plate with block multi-index `block`.
    pub fn sub_plate(&self, block: &[usize]) -> Result<Plate> {
        let sides: Vec<f64> = self
            .parent
            .side_lengths()
            .iter()
            .zip(&self.blocks_per_axis)
            .map(|(s, &b)| s / b as f64)
            .collect();
        let origin = self
            .parent
            .origin()
            .iter()
            .zip(&sides)
            .zip(block)
            .map(|((o, s), &i)| o + i as f64 * s)
            .collect();
        Plate::new(origin, sides, self.block_samples())
    }
}

/// Split `plate` into `blocks_per_axis` congruent sub-plates.
pub fn partition_plate(plate: &Plate, blocks_per_axis: &[usize]) -> Result<PlatePartition> {
    let ok = blocks_per_axis.len() == plate.dim()
        && plate
            .samples()
            .iter()
            .zip(blocks_per_axis)
            .all(|(&n, &b)| b > 0 && n % b == 0);
    if !ok {
        return Err(Error::Indivisible {
            shape: plate.samples().to_vec(),
            divisor: format!("blocks {blocks_per_axis:?}"),
        });
    }
    Ok(PlatePartition {
        parent: plate.clone(),
        blocks_per_axis: blocks_per_axis.to_vec(),
    })
}

/// Partition whose sub-plates hold `block_samples` samples each.
pub fn partition_by_block(plate: &Plate, block_samples: &[usize]) -> Result<PlatePartition> {
    let ok = block_samples.len() == plate.dim()
        && plate
            .samples()
            .iter()
            .zip(block_samples)
            .all(|(&n, &k)| k > 0 && n % k == 0);
    if !ok {
        return Err(Error::Indivisible {
            shape: plate.samples().to_vec(),
            divisor: format!("block {block_samples:?}"),
        });
    }
    let blocks: Vec<usize> = plate.samples().iter().zip(block_samples).map(|(n, k)| n / k).collect();
    partition_plate(plate, &blocks)
}

/// The pooling-factor threshold `(|D| ||f||_inf / ||f||_2)^(1/d)`.
pub fn min_admissible_factor(f: &SignalGrid) -> Result<f64> {
    let l2 = f.l2_norm();
    if l2 == 0.0 {
        return Err(Error::ZeroSignal("admissibility threshold"));
    }
    let d = f.plate().dim() as f64;
    Ok((f.plate().volume() * f.linf_norm() / l2).powf(1.0 / d))
}

/// `(|D| ||f||_inf^2 / ||f||_2^2)^(1/d)`: any larger factor gives `||P f||_2 <= ||f||_2`,
/// because `||P f||_2^2 <= |D/S| ||f||_inf^2`.
pub fn sufficient_contraction_factor(f: &SignalGrid) -> Result<f64> {
    let l2 = f.l2_norm();
    if l2 == 0.0 {
        return Err(Error::ZeroSignal("contraction threshold"));
    }
    let d = f.plate().dim() as f64;
    let ratio = f.linf_norm() / l2;
    Ok((f.plate().volume() * ratio * ratio).powf(1.0 / d))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    /// Pool regardless and record whether the factor was admissible.
    #[default]
    Warn,
    /// Refuse to pool with an inadmissible factor.
    Strict,
}

#[derive(Clone, Debug)]
pub struct Pooled {
    pub signal: SignalGrid,
    /// `None` for the zero signal, where every factor is admissible.
    pub threshold: Option<f64>,
    pub admissible: bool,
}

/// Max-pool `f` over `partition` with factor `factor`.
pub fn max_pool(f: &SignalGrid, partition: &PlatePartition, factor: f64, mode: Admissibility) -> Result<Pooled> {
    if !(factor.is_finite() && factor >= 1.0) {
        return Err(Error::InvalidFactor(factor));
    }
    if partition.parent() != f.plate() {
        return Err(Error::PartitionMismatch);
    }
    let threshold = if f.linf_norm() == 0.0 {
        None
    } else {
        Some(min_admissible_factor(f)?)
    };
    let admissible = threshold.is_none_or(|t| factor > t);
    if mode == Admissibility::Strict && !admissible {
        return Err(Error::Inadmissible {
            factor,
            threshold: threshold.unwrap_or(0.0),
        });
    }

    let shape = f.shape();
    let blocks = partition.blocks_per_axis();
    let inner = partition.block_samples();
    let values = f.values();
    let pooled: Vec<Complex64> = MultiIndex::new(blocks)
        .map(|block| {
            let mut best = 0.0f64;
            for offset in MultiIndex::new(&inner) {
                let idx: Vec<usize> = block
                    .iter()
                    .zip(&offset)
                    .zip(&inner)
                    .map(|((b, o), k)| b * k + o)
                    .collect();
                best = best.max(values[flat_index(shape, &idx)].norm());
            }
            Complex64::new(best, 0.0)
        })
        .collect();

    let plate = f.plate().shrunk(factor, blocks.to_vec())?;
    Ok(Pooled {
        signal: SignalGrid::new(plate, pooled)?,
        threshold,
        admissible,
    })
}

/// Drop trailing samples so every axis is a multiple of `block_samples`.
///
/// The plate keeps its origin and loses the truncated cells.
pub fn truncate_to_blocks(f: &SignalGrid, block_samples: &[usize]) -> Result<SignalGrid> {
    let shape = f.shape();
    if block_samples.len() != shape.len() || block_samples.contains(&0) {
        return Err(Error::Indivisible {
            shape: shape.to_vec(),
            divisor: format!("block {block_samples:?}"),
        });
    }
    let kept: Vec<usize> = shape.iter().zip(block_samples).map(|(n, k)| n / k * k).collect();
    if kept.contains(&0) {
        return Err(Error::Indivisible {
            shape: shape.to_vec(),
            divisor: format!("block {block_samples:?}"),
        });
    }
    if kept == shape {
        return Ok(f.clone());
    }
    let spacing = f.plate().spacing();
    let sides = kept.iter().zip(&spacing).map(|(&n, h)| n as f64 * h).collect();
    let plate = Plate::new(f.plate().origin().to_vec(), sides, kept.clone())?;
    let values = MultiIndex::new(&kept)
        .map(|idx| f.values()[flat_index(shape, &idx)])
        .collect();
    SignalGrid::new(plate, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block_pattern() -> SignalGrid {
        // 4x4 grid, constant on each 2x2 block: [[1,2],[3,4]]
        let mut vals = vec![0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                vals[r * 4 + c] = (1 + 2 * (r / 2) + c / 2) as f64;
            }
        }
        SignalGrid::from_real(Plate::unit(&[4, 4]).unwrap(), &vals).unwrap()
    }

    #[test]
    fn partition_shapes() {
        let plate = Plate::unit(&[4, 4]).unwrap();
        let p = partition_plate(&plate, &[2, 2]).unwrap();
        assert_eq!(p.count(), 4);
        assert_eq!(p.block_samples(), vec![2, 2]);
        let sub = p.sub_plate(&[1, 0]).unwrap();
        assert_eq!(sub.origin(), &[0.5, 0.0]);
        assert_eq!(sub.volume(), plate.volume() / 4.0);

        let whole = partition_plate(&plate, &[1, 1]).unwrap();
        assert_eq!(whole.count(), 1);
        assert_eq!(whole.sub_plate(&[0, 0]).unwrap(), plate);

        let line = Plate::unit(&[6]).unwrap();
        assert!(matches!(partition_plate(&line, &[4]), Err(Error::Indivisible { .. })));
    }

    #[test]
    fn sub_plates_are_translates_covering_parent() {
        let plate = Plate::new(vec![-1.0, -0.5], vec![2.0, 3.0], vec![6, 9]).unwrap();
        let p = partition_plate(&plate, &[3, 3]).unwrap();
        let subs: Vec<Plate> = MultiIndex::new(&[3, 3]).map(|b| p.sub_plate(&b).unwrap()).collect();
        let total: f64 = subs.iter().map(|s| s.volume()).sum();
        assert!((total - plate.volume()).abs() < 1e-12);
        for s in &subs {
            assert_eq!(s.side_lengths(), subs[0].side_lengths());
        }
    }

    #[test]
    fn threshold_examples() {
        let one = SignalGrid::constant(Plate::unit(&[4, 4]).unwrap(), 1.0);
        assert!((min_admissible_factor(&one).unwrap() - 1.0).abs() < 1e-15);

        let half = SignalGrid::from_real(Plate::unit(&[4]).unwrap(), &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((min_admissible_factor(&half).unwrap() - 2f64.sqrt()).abs() < 1e-15);

        let scaled = half.scale(3.5);
        assert!((min_admissible_factor(&scaled).unwrap() - min_admissible_factor(&half).unwrap()).abs() < 1e-15);

        let zero = SignalGrid::zeros(Plate::unit(&[4]).unwrap());
        assert!(matches!(min_admissible_factor(&zero), Err(Error::ZeroSignal(_))));
    }

    #[test]
    fn block_pattern_pools_to_block_values() {
        let f = block_pattern();
        let part = partition_plate(f.plate(), &[2, 2]).unwrap();
        let out = max_pool(&f, &part, 2.0, Admissibility::Warn).unwrap();
        assert_eq!(out.signal.real_parts(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(out.signal.plate().side_lengths(), &[0.5, 0.5]);
        assert_eq!(out.signal.shape(), &[2, 2]);
    }

    #[test]
    fn constant_pools_to_constant() {
        let f = SignalGrid::constant(Plate::new(vec![-0.5, -0.5], vec![1.0, 1.0], vec![6, 6]).unwrap(), 0.3);
        for blocks in [[1, 1], [2, 3], [6, 6]] {
            let part = partition_plate(f.plate(), &blocks).unwrap();
            let out = max_pool(&f, &part, 2.0, Admissibility::Warn).unwrap();
            assert!(out.signal.real_parts().iter().all(|&v| v == 0.3));
            assert_eq!(out.signal.plate().origin(), &[-0.25, -0.25]);
        }
    }

    #[test]
    fn pools_modulus_of_complex_values() {
        let plate = Plate::unit(&[2]).unwrap();
        let f = SignalGrid::new(plate, vec![Complex64::new(0.0, -3.0), Complex64::new(1.0, 1.0)]).unwrap();
        let part = partition_plate(f.plate(), &[1]).unwrap();
        let out = max_pool(&f, &part, 1.0, Admissibility::Warn).unwrap();
        assert_eq!(out.signal.real_parts(), vec![3.0]);
    }

    #[test]
    fn strict_mode_reports_threshold() {
        // a single spike has a large threshold
        let mut vals = vec![0.0; 16];
        vals[5] = 1.0;
        let f = SignalGrid::from_real(Plate::unit(&[4, 4]).unwrap(), &vals).unwrap();
        let part = partition_plate(f.plate(), &[2, 2]).unwrap();
        match max_pool(&f, &part, 2.0, Admissibility::Strict) {
            Err(Error::Inadmissible { threshold, .. }) => assert!((threshold - 2.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        let warned = max_pool(&f, &part, 2.0, Admissibility::Warn).unwrap();
        assert!(!warned.admissible);
        assert_eq!(warned.threshold, Some(2.0));
    }

    #[test]
    fn rejects_foreign_partition_and_bad_factor() {
        let f = block_pattern();
        let other = partition_plate(&Plate::unit(&[4, 8]).unwrap(), &[2, 2]).unwrap();
        assert!(matches!(
            max_pool(&f, &other, 2.0, Admissibility::Warn),
            Err(Error::PartitionMismatch)
        ));
        let part = partition_plate(f.plate(), &[2, 2]).unwrap();
        assert!(matches!(
            max_pool(&f, &part, 0.5, Admissibility::Warn),
            Err(Error::InvalidFactor(_))
        ));
    }

    #[test]
    fn truncation_keeps_origin_and_spacing() {
        let plate = Plate::new(vec![0.0, 0.0], vec![7.0, 8.0], vec![7, 8]).unwrap();
        let vals: Vec<f64> = (0..56).map(|v| v as f64).collect();
        let f = SignalGrid::from_real(plate, &vals).unwrap();
        let t = truncate_to_blocks(&f, &[3, 3]).unwrap();
        assert_eq!(t.shape(), &[6, 6]);
        assert_eq!(t.plate().side_lengths(), &[6.0, 6.0]);
        assert_eq!(t.real_parts()[6], 8.0);
    }
}
