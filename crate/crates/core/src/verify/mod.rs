//! Numerical certification suites.
//!
//! Each suite returns a [`VerificationReport`] holding, for every case, the
//! measured quantity next to the bound it was checked against. Slack factors
//! are kept separate on purpose: `1e-12` relative for floating-point noise in
//! exact identities, `(1 + eps_lp)` for inequalities that lean on the frame
//! identity, and a multiplicative `1.1` on the translation decay bound for
//! discretization.

mod generate;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{
    build_morlet_bank, frame_defect, shannon_partition_bank, translation_lipschitz_constant, FilterBank, FilterDesign,
    MorletParams, Normalization,
};
use crate::grid::{Plate, SignalGrid};
use crate::pooling::{
    max_pool, min_admissible_factor, partition_by_block, sufficient_contraction_factor, Admissibility,
};
use crate::scattering::{compute_tree, Engine, Mode, PathPolicy, PoolConfig, ScatteringTree, TreeConfig};

pub use generate::{random_signal, trial_rng, SignalFamily};
pub use report::{fmt_f64, CaseRecord, CaseStatus, Table, Verdict, VerificationReport};

/// Relative slack for comparisons that hold exactly in real arithmetic.
pub const FP_SLACK: f64 = 1e-12;
/// Multiplicative margin on the translation decay bound.
pub const DECAY_SLACK: f64 = 1.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionConfig {
    pub trials: usize,
    pub shape: Vec<usize>,
    pub block: usize,
    /// Candidate pooling factors; the smallest admissible one is used.
    pub factors: Vec<f64>,
    pub spike_density: f64,
    pub seed: u64,
    /// Treat a trial without an admissible factor as an error instead of a skip.
    pub strict: bool,
}

impl Default for ContractionConfig {
    fn default() -> Self {
        ContractionConfig {
            trials: 1000,
            shape: vec![16, 16],
            block: 2,
            factors: vec![2.0],
            spike_density: 0.3,
            seed: 0,
            strict: false,
        }
    }
}

/// `||P f||_2 <= ||f||_2` for random signals on the unit plate.
pub fn check_contraction(cfg: &ContractionConfig) -> Result<VerificationReport> {
    let plate = Plate::unit(&cfg.shape)?;
    let block = vec![cfg.block; cfg.shape.len()];
    let mut factors = cfg.factors.clone();
    factors.sort_by(f64::total_cmp);

    // (inputs, Some((above sufficient threshold, ||P f||, ||f||)) or None when skipped)
    type Trial = (String, Option<(bool, f64, f64)>);
    let outcomes: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let family = SignalFamily::for_trial(t);
            let f = random_signal(&mut trial_rng(cfg.seed, t), &plate, family, cfg.spike_density);
            let threshold = min_admissible_factor(&f)?;
            let inputs = format!("trial={t} family={family:?} threshold={threshold:.6}");
            let Some(&factor) = factors.iter().find(|&&s| s > threshold) else {
                if cfg.strict {
                    return Err(Error::Precondition {
                        check: "check_contraction",
                        message: format!(
                            "no factor in {:?} exceeds the admissibility threshold ({inputs})",
                            cfg.factors
                        ),
                    });
                }
                return Ok((inputs, None));
            };
            let partition = partition_by_block(f.plate(), &block)?;
            let pooled = max_pool(&f, &partition, factor, Admissibility::Strict)?;
            let guaranteed = factor > sufficient_contraction_factor(&f)?;
            Ok((
                format!("{inputs} S={factor}"),
                Some((guaranteed, pooled.signal.l2_norm(), f.l2_norm())),
            ))
        })
        .collect::<Result<_>>()?;

    let mut report = VerificationReport::new("contraction");
    report.env("trials", cfg.trials);
    report.env("shape", format!("{:?}", cfg.shape));
    report.env("block", cfg.block);
    report.env("factors", format!("{:?}", cfg.factors));
    report.env("seed", cfg.seed);
    // trials where S also clears (|D| ||f||_inf^2 / ||f||_2^2)^(1/d)
    let guaranteed = outcomes.iter().filter(|(_, o)| matches!(o, Some((true, _, _)))).count();
    report.env("above_sufficient_threshold", guaranteed);
    for (inputs, outcome) in outcomes {
        match outcome {
            Some((_, pooled, norm)) => {
                report.check_le("pooled_l2<=l2", inputs, pooled, norm * (1.0 + FP_SLACK));
            }
            None => report.push("no_admissible_factor", inputs, f64::NAN, f64::NAN, CaseStatus::Skipped),
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationConfig {
    pub trials: usize,
    pub shape: Vec<usize>,
    pub block: usize,
    pub factor: f64,
    pub spike_density: f64,
    pub seed: u64,
}

impl Default for CommutationConfig {
    fn default() -> Self {
        CommutationConfig {
            trials: 200,
            shape: vec![8, 8],
            block: 2,
            factor: 2.0,
            spike_density: 0.3,
            seed: 0,
        }
    }
}

/// Compare `P(T_c f)` with `T_{c/S} P(f)` bit for bit.
pub fn pool_commutes(f: &SignalGrid, shift: &[f64], block: usize, factor: f64) -> Result<bool> {
    let block = vec![block; f.plate().dim()];
    let shifted = f.translate_with_plate(shift)?;
    let lhs = max_pool(
        &shifted,
        &partition_by_block(shifted.plate(), &block)?,
        factor,
        Admissibility::Warn,
    )?;
    let pooled = max_pool(f, &partition_by_block(f.plate(), &block)?, factor, Admissibility::Warn)?;
    let scaled: Vec<f64> = shift.iter().map(|c| c / factor).collect();
    let rhs = pooled.signal.translate_with_plate(&scaled)?;
    Ok(lhs.signal.values_bit_eq(&rhs) && lhs.signal.plate().bit_eq(rhs.plate()))
}

/// Pooling commutes with block-aligned plate translations on `[-1,1]^d`.
pub fn check_commutation(cfg: &CommutationConfig) -> Result<VerificationReport> {
    let d = cfg.shape.len();
    let plate = Plate::new(vec![-1.0; d], vec![2.0; d], cfg.shape.clone())?;
    let block_width: Vec<f64> = plate.spacing().iter().map(|h| h * cfg.block as f64).collect();
    let blocks: Vec<i64> = cfg.shape.iter().map(|&n| (n / cfg.block) as i64).collect();

    let outcomes: Vec<(String, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let family = SignalFamily::for_trial(t);
            let f = random_signal(&mut rng, &plate, family, cfg.spike_density);
            // keep 0 inside D + c: |c| <= 1 on every axis
            let steps: Vec<i64> = if t == 0 {
                vec![0; d]
            } else {
                blocks
                    .iter()
                    .map(|&b| rand::Rng::gen_range(&mut rng, -(b / 2)..=b / 2))
                    .collect()
            };
            let shift: Vec<f64> = steps.iter().zip(&block_width).map(|(&k, w)| k as f64 * w).collect();
            let equal = pool_commutes(&f, &shift, cfg.block, cfg.factor)?;
            Ok((format!("trial={t} family={family:?} blocks={steps:?}"), equal))
        })
        .collect::<Result<_>>()?;

    let mut report = VerificationReport::new("commutation");
    report.env("trials", cfg.trials);
    report.env("shape", format!("{:?}", cfg.shape));
    report.env("block", cfg.block);
    report.env("S", cfg.factor);
    report.env("seed", cfg.seed);
    for (inputs, equal) in outcomes {
        let status = if equal { CaseStatus::Pass } else { CaseStatus::Fail };
        report.push("bit_exact", inputs, if equal { 0.0 } else { 1.0 }, 0.0, status);
    }
    report.push(
        "non_block_aligned_shift",
        "excluded by generator",
        f64::NAN,
        f64::NAN,
        CaseStatus::Skipped,
    );
    Ok(report)
}

/// `eps_lp` of `bank` against `bound`, plus the exact partition fixture on the
/// same grid against `fixture_bound`.
pub fn check_frame_defect(bank: &FilterBank, bound: f64, fixture_bound: f64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("frame_defect");
    report.env("J", bank.scales());
    report.env("L", bank.rotations());
    report.env("shape", format!("{:?}", bank.shape()));
    report.env("design", format!("{:?}", bank.design()));
    report.env("B", fmt_f64(translation_lipschitz_constant(bank)));
    report.check_le("eps_lp", "bank", frame_defect(bank), bound);
    if let FilterDesign::Morlet(params) = bank.design() {
        let raw = MorletParams {
            normalization: Normalization::Raw,
            ..*params
        };
        let raw_bank = build_morlet_bank(bank.scales(), bank.rotations(), bank.shape(), raw)?;
        report.push(
            "eps_lp_raw_gain",
            "diagnostic",
            frame_defect(&raw_bank),
            f64::NAN,
            CaseStatus::Info,
        );
    }
    let fixture = shannon_partition_bank(bank.scales(), bank.rotations(), bank.shape())?;
    report.check_le("eps_lp", "partition_fixture", frame_defect(&fixture), fixture_bound);
    Ok(report)
}

/// Largest frame defect over the banks a tree actually used.
pub fn tree_frame_defect(tree: &ScatteringTree) -> f64 {
    (0..=tree.max_depth())
        .map(|m| frame_defect(tree.bank_at(m)))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    pub tree: TreeConfig,
    /// Additionally demand `E_{m+1} < E_m` without frame slack.
    pub require_strict_decrease: bool,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            tree: TreeConfig {
                mode: Mode::Maxp,
                max_depth: 3,
                ..Default::default()
            },
            require_strict_decrease: false,
        }
    }
}

/// Layer energies of the pooled cascade decrease up to the measured frame defect.
pub fn check_energy_monotonic(f: &SignalGrid, bank: &FilterBank, cfg: &EnergyConfig) -> Result<VerificationReport> {
    let tree_cfg = TreeConfig {
        mode: Mode::Maxp,
        ..cfg.tree.clone()
    };
    let tree = compute_tree(f, bank, &tree_cfg)?;
    let eps = tree_frame_defect(&tree);
    let energy = tree.layer_energy();

    let mut report = VerificationReport::new("energy_monotonic");
    report.env("J", bank.scales());
    report.env("L", bank.rotations());
    report.env("shape", format!("{:?}", bank.shape()));
    report.env("depth", tree_cfg.max_depth);
    report.env("S", tree_cfg.pool.factor);
    report.env("eps_lp", fmt_f64(eps));
    report.env("inadmissible_pools", tree.pooling_stats().inadmissible);

    for m in 0..energy.len().saturating_sub(1) {
        let step_bound = (1.0 + eps) * energy[m] * (1.0 + FP_SLACK);
        report.check_le("E_next<=(1+eps)E", format!("m={m}"), energy[m + 1], step_bound);
        if cfg.require_strict_decrease {
            let ok = energy[m + 1] < energy[m] || (energy[m] == 0.0 && energy[m + 1] == 0.0);
            let status = if ok { CaseStatus::Pass } else { CaseStatus::Fail };
            report.push("E_next<E", format!("m={m}"), energy[m + 1], energy[m], status);
        }
    }
    for (m, &e) in energy.iter().enumerate() {
        let bound = (1.0 + eps).powi(m as i32) * energy[0] * (1.0 + FP_SLACK);
        report.check_le("E<=(1+eps)^m|f|^2", format!("m={m}"), e, bound);
    }
    report.table = Some(Table {
        columns: vec!["m".into(), "E_m".into()],
        rows: energy.iter().enumerate().map(|(m, &e)| vec![m as f64, e]).collect(),
    });
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub tree: TreeConfig,
    pub slack: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            tree: TreeConfig {
                mode: Mode::Maxp,
                max_depth: 3,
                ..Default::default()
            },
            slack: DECAY_SLACK,
        }
    }
}

/// Per-depth translation discrepancy of the pooled network.
#[derive(Clone, Debug)]
pub struct DecaySeries {
    pub discrepancy: Vec<f64>,
    pub bound: Vec<f64>,
    pub constant_b: f64,
}

/// `d_m = sum_p ||S[p] f - S[p] T_c f||^2` and the geometric bound for each depth.
///
/// `S[p] T_c f` lives on the plate moved by `c / S^m`; it is compared with
/// `S[p] f` on the torus of the unmoved plate.
pub fn invariance_decay_series(
    f: &SignalGrid,
    shift: &[f64],
    bank: &FilterBank,
    cfg: &DecayConfig,
) -> Result<DecaySeries> {
    let tree_cfg = TreeConfig {
        mode: Mode::Maxp,
        ..cfg.tree.clone()
    };
    let factor = tree_cfg.pool.factor;
    let coarsest = (tree_cfg.pool.block as f64).powi(tree_cfg.max_depth as i32);
    let per_block: Vec<f64> = shift.iter().map(|c| c / coarsest).collect();
    f.plate()
        .shift_in_samples(&per_block)
        .map_err(|_| Error::MisalignedShift(shift.to_vec()))?;
    let moved = f.translate_with_plate(shift)?;
    let base = compute_tree(f, bank, &tree_cfg)?;
    let other = compute_tree(&moved, bank, &tree_cfg)?;

    let constant_b = (0..=tree_cfg.max_depth)
        .map(|m| translation_lipschitz_constant(base.bank_at(m)))
        .fold(0.0, f64::max);
    let shift_ref: f64 = shift
        .iter()
        .zip(f.plate().spacing())
        .map(|(c, h)| (c / h).powi(2))
        .sum();
    let norm_sq = f.energy();

    let mut discrepancy = Vec::with_capacity(tree_cfg.max_depth + 1);
    let mut bound = Vec::with_capacity(tree_cfg.max_depth + 1);
    for m in 0..=tree_cfg.max_depth {
        let scale = factor.powi(m as i32);
        let local: Vec<f64> = shift.iter().map(|c| c / scale).collect();
        let mut total = 0.0;
        for (a, b) in base.layer(m).iter().zip(other.layer(m)) {
            let steps = a.output.plate().shift_in_samples(&local)?;
            let aligned = SignalGrid::new(a.output.plate().clone(), b.output.values().to_vec())?.circular_shift(&steps);
            total += a.output.sub(&aligned)?.energy();
        }
        discrepancy.push(total);
        bound.push(cfg.slack * shift_ref * constant_b * constant_b * norm_sq / (scale * scale));
    }
    Ok(DecaySeries {
        discrepancy,
        bound,
        constant_b,
    })
}

pub fn check_invariance_decay(
    f: &SignalGrid,
    shift: &[f64],
    bank: &FilterBank,
    cfg: &DecayConfig,
) -> Result<VerificationReport> {
    let series = invariance_decay_series(f, shift, bank, cfg)?;
    let mut report = VerificationReport::new("invariance_decay");
    report.env("J", bank.scales());
    report.env("L", bank.rotations());
    report.env("shape", format!("{:?}", bank.shape()));
    report.env("depth", cfg.tree.max_depth);
    report.env("S", cfg.tree.pool.factor);
    report.env("shift", format!("{shift:?}"));
    report.env("B", fmt_f64(series.constant_b));
    report.env("slack", cfg.slack);

    let d = &series.discrepancy;
    for (m, (&dm, &bm)) in d.iter().zip(&series.bound).enumerate() {
        report.check_le("d_m<=bound", format!("m={m}"), dm, bm);
    }
    for m in 1..d.len() {
        report.check_le("d_m<=d_(m-1)", format!("m={m}"), d[m], d[m - 1] * (1.0 + FP_SLACK));
    }
    report.table = Some(Table {
        columns: vec!["m".into(), "d_m".into(), "bound_m".into()],
        rows: d
            .iter()
            .zip(&series.bound)
            .enumerate()
            .map(|(m, (&dm, &bm))| vec![m as f64, dm, bm])
            .collect(),
    });
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceConfig {
    pub trials: usize,
    pub shape: Vec<usize>,
    pub scales: u32,
    pub rotations: u32,
    pub params: MorletParams,
    pub max_depth: usize,
    pub policy: PathPolicy,
    pub spike_density: f64,
    pub seed: u64,
    /// Scales for the recorded (unasserted) invariance sweep.
    pub sweep_scales: Vec<u32>,
}

impl Default for EquivarianceConfig {
    fn default() -> Self {
        EquivarianceConfig {
            trials: 50,
            shape: vec![16, 16],
            scales: 2,
            rotations: 2,
            params: MorletParams::default(),
            max_depth: 2,
            policy: PathPolicy::Full,
            spike_density: 0.3,
            seed: 0,
            sweep_scales: vec![1, 2, 3],
        }
    }
}

fn max_relative_gap(a: &ScatteringTree, b: &ScatteringTree, offset: &[i64]) -> f64 {
    let mut gap = 0.0f64;
    let mut scale = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        let shifted = x.output.circular_shift(offset);
        for (p, q) in shifted.values().iter().zip(y.output.values()) {
            gap = gap.max((p - q).norm());
            scale = scale.max(p.norm());
        }
    }
    if scale == 0.0 {
        gap
    } else {
        gap / scale
    }
}

/// Circular-shift equivariance of the plain cascade, checked bit for bit on the
/// direct-sum engine; also records the FFT engine's deviation and an
/// invariance sweep over `J`.
pub fn check_shift_equivariance_plain(cfg: &EquivarianceConfig) -> Result<VerificationReport> {
    let plate = Plate::unit(&cfg.shape)?;
    let bank = build_morlet_bank(cfg.scales, cfg.rotations, &cfg.shape, cfg.params)?;
    let direct = TreeConfig {
        mode: Mode::Plain,
        max_depth: cfg.max_depth,
        policy: cfg.policy,
        engine: Engine::Direct,
        ..Default::default()
    };
    let fft = TreeConfig {
        engine: Engine::Fft,
        ..direct.clone()
    };

    let outcomes: Vec<(String, usize, usize, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let family = SignalFamily::for_trial(t);
            let f = random_signal(&mut rng, &plate, family, cfg.spike_density);
            let offset: Vec<i64> = if t == 0 {
                vec![0; cfg.shape.len()]
            } else {
                cfg.shape
                    .iter()
                    .map(|&n| rand::Rng::gen_range(&mut rng, -(n as i64) + 1..n as i64))
                    .collect()
            };
            let g = f.translate_in_plate(&offset)?;
            let a = compute_tree(&f, &bank, &direct)?;
            let b = compute_tree(&g, &bank, &direct)?;
            let mut mismatched = 0;
            let mut compared = 0;
            for (x, y) in a.iter().zip(b.iter()) {
                let (xn, yn) = (x.node.as_ref().expect("retained"), y.node.as_ref().expect("retained"));
                for (p, q) in [(xn, yn), (&x.output, &y.output)] {
                    compared += 1;
                    if !p.circular_shift(&offset).values_bit_eq(q) {
                        mismatched += 1;
                    }
                }
            }
            let fa = compute_tree(&f, &bank, &fft)?;
            let fb = compute_tree(&g, &bank, &fft)?;
            let gap = max_relative_gap(&fa, &fb, &offset);
            Ok((
                format!("trial={t} family={family:?} offset={offset:?}"),
                mismatched,
                compared,
                gap,
            ))
        })
        .collect::<Result<_>>()?;

    let mut report = VerificationReport::new("shift_equivariance_plain");
    report.env("trials", cfg.trials);
    report.env("shape", format!("{:?}", cfg.shape));
    report.env("J", cfg.scales);
    report.env("L", cfg.rotations);
    report.env("depth", cfg.max_depth);
    report.env("seed", cfg.seed);
    for (inputs, mismatched, compared, gap) in outcomes {
        let status = if mismatched == 0 {
            CaseStatus::Pass
        } else {
            CaseStatus::Fail
        };
        report.push(
            "direct_bit_exact",
            format!("{inputs} signals={compared}"),
            mismatched as f64,
            0.0,
            status,
        );
        report.check_le("fft_relative_gap", inputs, gap, FP_SLACK);
    }

    // finite-J invariance, recorded only
    let f = random_signal(&mut trial_rng(cfg.seed, usize::MAX), &plate, SignalFamily::Uniform, 0.0);
    let offset: Vec<i64> = cfg.shape.iter().map(|&n| (n / 4) as i64).collect();
    let g = f.translate_in_plate(&offset)?;
    for &scales in &cfg.sweep_scales {
        let bank = match build_morlet_bank(scales, cfg.rotations, &cfg.shape, cfg.params) {
            Ok(b) => b,
            Err(Error::Indivisible { .. }) => continue,
            Err(e) => return Err(e),
        };
        let a = compute_tree(&f, &bank, &fft)?;
        let b = compute_tree(&g, &bank, &fft)?;
        let diff: f64 = a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| x.output.sub(&y.output).map(|d| d.energy()))
            .sum::<Result<f64>>()?;
        report.push(
            "normalized_invariance_gap",
            format!("J={scales} offset={offset:?}"),
            diff / f.energy(),
            f64::NAN,
            CaseStatus::Info,
        );
    }
    Ok(report)
}

/// A uniform random image on the unit plate, as used by the CLI suites.
pub fn test_image(shape: &[usize], seed: u64, index: usize) -> Result<SignalGrid> {
    let plate = Plate::unit(shape)?;
    Ok(random_signal(
        &mut trial_rng(seed, index),
        &plate,
        SignalFamily::Uniform,
        0.0,
    ))
}

/// Shift of one pooling block at depth `depth` along axis 0, signed so that
/// the moved plate still contains the origin.
pub fn one_block_shift(plate: &Plate, pool: &PoolConfig, depth: usize) -> Vec<f64> {
    let h = plate.spacing();
    let mut c = vec![0.0; plate.dim()];
    c[0] = h[0] * (pool.block as f64).powi(depth as i32);
    let origin: Vec<f64> = plate.origin().iter().zip(&c).map(|(o, s)| o + s).collect();
    if !plate.with_origin(origin).contains_zero() {
        c[0] = -c[0];
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_small_run() {
        let cfg = ContractionConfig {
            trials: 40,
            ..Default::default()
        };
        let r = check_contraction(&cfg).unwrap();
        assert_eq!(r.verdict(), Verdict::Pass);
        assert_eq!(r.cases.len(), 40);
    }

    #[test]
    fn contraction_all_skipped_is_inconclusive() {
        let cfg = ContractionConfig {
            trials: 6,
            factors: vec![1.0],
            ..Default::default()
        };
        let r = check_contraction(&cfg).unwrap();
        assert_eq!(r.verdict(), Verdict::Inconclusive);
    }

    #[test]
    fn commutation_zero_shift() {
        let plate = Plate::new(vec![-1.0, -1.0], vec![2.0, 2.0], vec![8, 8]).unwrap();
        let f = SignalGrid::new(plate, test_image(&[8, 8], 1, 0).unwrap().into_values()).unwrap();
        assert!(pool_commutes(&f, &[0.0, 0.0], 2, 2.0).unwrap());
        assert!(pool_commutes(&f, &[0.5, 0.0], 2, 2.0).unwrap());
    }

    #[test]
    fn energy_of_zero_signal() {
        let bank = shannon_partition_bank(2, 2, &[16, 16]).unwrap();
        let f = SignalGrid::zeros(Plate::unit(&[16, 16]).unwrap());
        let r = check_energy_monotonic(&f, &bank, &EnergyConfig::default()).unwrap();
        assert!(r.table.unwrap().rows.iter().all(|row| row[1] == 0.0));
    }

    #[test]
    fn decay_zero_shift_is_zero() {
        let bank = build_morlet_bank(2, 2, &[16, 16], MorletParams::default()).unwrap();
        let f = test_image(&[16, 16], 0, 0).unwrap();
        let s = invariance_decay_series(&f, &[0.0, 0.0], &bank, &DecayConfig::default()).unwrap();
        assert!(s.discrepancy.iter().all(|&d| d == 0.0));
        // geometric with ratio S^-2
        for w in s.bound.windows(2) {
            assert_eq!(w[1], 0.0 * w[0]);
        }
    }

    #[test]
    fn decay_bound_ratio_is_quarter() {
        let bank = build_morlet_bank(2, 2, &[16, 16], MorletParams::default()).unwrap();
        let f = test_image(&[16, 16], 0, 0).unwrap();
        let c = one_block_shift(f.plate(), &PoolConfig::default(), 2);
        let cfg = DecayConfig {
            tree: TreeConfig {
                mode: Mode::Maxp,
                max_depth: 2,
                ..Default::default()
            },
            ..Default::default()
        };
        let s = invariance_decay_series(&f, &c, &bank, &cfg).unwrap();
        for w in s.bound.windows(2) {
            assert!((w[1] / w[0] - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn decay_rejects_misaligned_shift() {
        let bank = build_morlet_bank(2, 2, &[16, 16], MorletParams::default()).unwrap();
        let f = test_image(&[16, 16], 0, 0).unwrap();
        // one sample is aligned at depth 0 but not after pooling
        let c = [-1.0 / 16.0, 0.0];
        assert!(matches!(
            invariance_decay_series(&f, &c, &bank, &DecayConfig::default()),
            Err(Error::MisalignedShift(_))
        ));
    }

    #[test]
    fn equivariance_small_run() {
        let cfg = EquivarianceConfig {
            trials: 3,
            shape: vec![8, 8],
            scales: 1,
            max_depth: 1,
            sweep_scales: vec![1, 2],
            ..Default::default()
        };
        let r = check_shift_equivariance_plain(&cfg).unwrap();
        assert_eq!(r.verdict(), Verdict::Pass);
        assert_eq!(r.count(CaseStatus::Info), 2);
    }
}
