//! The `scatmaxp` command line.

mod config;

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filterbank::{
    build_morlet_bank, frame_defect, shannon_partition_bank, translation_lipschitz_constant, FilterBank,
};
use crate::grid::io::{load_signal, save_sgrid};
use crate::grid::{Plate, SignalGrid};
use crate::pooling::Admissibility;
use crate::scattering::{
    compute_tree, feature_summary, write_coefficients_csv, write_coefficients_sgrid, Mode, PathPolicy,
};
use crate::verify::{
    check_commutation, check_contraction, check_energy_monotonic, check_frame_defect, check_invariance_decay,
    check_shift_equivariance_plain, one_block_shift, test_image, CommutationConfig, ContractionConfig, DecayConfig,
    EnergyConfig, EquivarianceConfig, Table, Verdict, VerificationReport, DECAY_SLACK,
};

pub use config::{OutputFormat, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "scatmaxp",
    version,
    about = "Scattering transforms with max-pooling between layers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// `key = value` file applied before the flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    /// Cascade depth (also used by the verification suites).
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub policy: Option<PathPolicy>,
    /// Refuse to pool with an inadmissible factor.
    #[arg(long, global = true)]
    pub strict_pooling: bool,
    /// Override any config key.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the filter bank as SGRID spectra plus a manifest.
    Filterbank,
    /// Compute scattering coefficients of an image (PGM or SGRID).
    Scatter {
        input: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Run the verification suites.
    Verify {
        /// Suites to run (contraction, commutation, frame, energy, decay, equivariance, all).
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Time the three modes on synthetic inputs.
    Bench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Outcome::Pass => ExitCode::SUCCESS,
            Outcome::Fail => ExitCode::from(1),
            Outcome::Inconclusive => ExitCode::from(3),
        }
    }
}

/// Defaults, then the config file, then flags.
pub fn resolve_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for item in &common.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {item:?}")))?;
        cfg.set(k.trim(), v)?;
    }
    if let Some(mode) = common.mode {
        cfg.mode = mode;
    }
    if let Some(depth) = common.depth {
        cfg.depth = depth;
        cfg.verify_depth = depth;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(policy) = common.policy {
        cfg.policy = policy;
    }
    if common.strict_pooling {
        cfg.admissibility = Admissibility::Strict;
    }
    Ok(cfg)
}

/// Honour `SCATMAXP_THREADS` for the global rayon pool.
pub fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var("SCATMAXP_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("SCATMAXP_THREADS: expected a positive integer, got {value:?}")))?;
    if n == 0 {
        return Err(Error::Config("SCATMAXP_THREADS must be at least 1".into()));
    }
    // a pool that already exists (tests) keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: Cli) -> ExitCode {
    let result = init_threads()
        .and_then(|_| resolve_config(&cli.common))
        .and_then(|mut cfg| match cli.command {
            Command::Filterbank => cmd_filterbank(&cfg),
            Command::Scatter { input, format } => {
                if let Some(input) = input {
                    cfg.input = Some(input);
                }
                if let Some(format) = format {
                    cfg.format = format.parse()?;
                }
                cmd_scatter(&cfg)
            }
            Command::Verify { suites } => {
                if !suites.is_empty() {
                    cfg.suites = suites;
                }
                cmd_verify(&cfg)
            }
            Command::Bench => cmd_bench(&cfg),
        });
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn create_dir(dir: &FsPath) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &FsPath, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn write_text(path: &FsPath, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn morlet_bank(cfg: &RunConfig, shape: &[usize]) -> Result<FilterBank> {
    build_morlet_bank(cfg.scales, cfg.rotations, shape, cfg.morlet())
}

#[derive(Serialize)]
struct FilterFile {
    file: String,
    kind: &'static str,
    j: Option<u32>,
    r: Option<u32>,
}

/// Filters are written in the frequency domain, one bin per sample, DC first.
pub fn cmd_filterbank(cfg: &RunConfig) -> Result<Outcome> {
    let bank = morlet_bank(cfg, &cfg.shape)?;
    create_dir(&cfg.out)?;
    let plate = Plate::unit(&cfg.shape)?;
    let mut files = Vec::new();
    for (idx, spectrum) in bank.wavelets() {
        let file = format!("psi_j{}_r{}.sgrid", idx.j, idx.r);
        let grid = SignalGrid::new(plate.clone(), spectrum.values().to_vec())?;
        save_sgrid(&grid, &cfg.out.join(&file))?;
        files.push(FilterFile {
            file,
            kind: "wavelet",
            j: Some(idx.j),
            r: Some(idx.r),
        });
    }
    let grid = SignalGrid::new(plate, bank.phi().values().to_vec())?;
    save_sgrid(&grid, &cfg.out.join("phi.sgrid"))?;
    files.push(FilterFile {
        file: "phi.sgrid".into(),
        kind: "lowpass",
        j: None,
        r: None,
    });

    let raw = build_morlet_bank(
        cfg.scales,
        cfg.rotations,
        &cfg.shape,
        crate::filterbank::MorletParams {
            normalization: crate::filterbank::Normalization::Raw,
            ..cfg.morlet()
        },
    )?;
    let eps = frame_defect(&bank);
    let b = translation_lipschitz_constant(&bank);
    let manifest = serde_json::json!({
        "domain": "frequency",
        "scales": cfg.scales,
        "rotations": cfg.rotations,
        "shape": cfg.shape,
        "design": bank.design(),
        "frame_defect": eps,
        "frame_defect_raw_gain": frame_defect(&raw),
        "translation_lipschitz_constant": b,
        "files": files,
        "config": cfg.echo(),
    });
    write_json(&cfg.out.join("manifest.json"), &manifest)?;
    println!(
        "wrote {} filters to {} (eps_lp = {eps:.6e}, B = {b:.6e})",
        files.len(),
        cfg.out.display()
    );
    Ok(Outcome::Pass)
}

pub fn cmd_scatter(cfg: &RunConfig) -> Result<Outcome> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("scatter needs an input image (positional or input = PATH)".into()))?;
    let f = load_signal(input)?;
    let bank = morlet_bank(cfg, f.shape())?;
    let tree = compute_tree(&f, &bank, &cfg.tree(cfg.mode, cfg.depth))?;
    create_dir(&cfg.out)?;
    match cfg.format {
        OutputFormat::Sgrid => {
            write_coefficients_sgrid(&tree, &cfg.out, cfg.echo())?;
        }
        OutputFormat::Csv => {
            let path = cfg.out.join("coefficients.csv");
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            write_coefficients_csv(&tree, std::io::BufWriter::new(file)).map_err(|e| Error::io(&path, e))?;
        }
    }
    let summary = feature_summary(&tree, &cfg.fc_widths, cfg.n_classes);
    let report = serde_json::json!({
        "input": input,
        "summary": summary,
        "pooling": tree.pooling_stats(),
        "config": cfg.echo(),
    });
    write_json(&cfg.out.join("summary.json"), &report)?;
    println!(
        "{} coefficient maps, F = {}, head parameters = {}",
        tree.output_count(),
        summary.feature_dim,
        summary.head_params
    );
    let stats = tree.pooling_stats();
    if stats.inadmissible > 0 {
        println!(
            "note: {} of {} pooling steps used an inadmissible factor",
            stats.inadmissible, stats.pooled
        );
    }
    Ok(Outcome::Pass)
}

/// Fold several reports into one; table rows gain a leading `key` column
/// holding the part number.
fn merge_reports(suite: &str, key: &str, parts: Vec<(String, VerificationReport)>) -> VerificationReport {
    let mut merged = VerificationReport::new(suite);
    let mut table: Option<Table> = None;
    for (n, (tag, part)) in parts.into_iter().enumerate() {
        if n == 0 {
            merged.environment = part.environment.clone();
        }
        for mut case in part.cases {
            case.inputs = format!("{tag} {}", case.inputs);
            merged.cases.push(case);
        }
        if let Some(t) = part.table {
            let dest = table.get_or_insert_with(|| Table {
                columns: std::iter::once(key.to_string())
                    .chain(t.columns.iter().cloned())
                    .collect(),
                rows: Vec::new(),
            });
            for row in t.rows {
                dest.rows.push(std::iter::once(n as f64).chain(row).collect());
            }
        }
    }
    merged.table = table;
    merged
}

pub fn run_suites(cfg: &RunConfig) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    let strict = cfg.admissibility == Admissibility::Strict;

    if cfg.suite_selected("contraction") {
        let suite_cfg = ContractionConfig {
            trials: cfg.contraction_trials,
            shape: cfg.contraction_shape.clone(),
            block: cfg.pool_block,
            factors: vec![cfg.pool_factor],
            spike_density: cfg.spike_density,
            seed: cfg.seed,
            strict,
        };
        reports.push(check_contraction(&suite_cfg)?);
    }
    if cfg.suite_selected("commutation") {
        let suite_cfg = CommutationConfig {
            trials: cfg.commutation_trials,
            shape: cfg.commutation_shape.clone(),
            block: cfg.pool_block,
            factor: cfg.pool_factor,
            spike_density: cfg.spike_density,
            seed: cfg.seed,
        };
        reports.push(check_commutation(&suite_cfg)?);
    }
    let needs_bank = ["frame", "energy", "decay"].iter().any(|s| cfg.suite_selected(s));
    let bank = if needs_bank {
        Some(morlet_bank(cfg, &cfg.shape)?)
    } else {
        None
    };
    if let (true, Some(bank)) = (cfg.suite_selected("frame"), &bank) {
        reports.push(check_frame_defect(bank, cfg.frame_bound, 1e-12)?);
    }
    let tree = cfg.tree(Mode::Maxp, cfg.verify_depth);
    if let (true, Some(bank)) = (cfg.suite_selected("energy"), &bank) {
        let fixture = shannon_partition_bank(cfg.scales, cfg.rotations, &cfg.shape)?;
        let energy = |strict: bool| EnergyConfig {
            tree: tree.clone(),
            require_strict_decrease: strict,
        };
        let parts: Vec<Vec<(String, VerificationReport)>> = (0..cfg.energy_inputs)
            .into_par_iter()
            .map(|i| {
                let f = test_image(&cfg.shape, cfg.seed, i)?;
                Ok(vec![
                    (
                        format!("input={i} bank=morlet"),
                        check_energy_monotonic(&f, bank, &energy(false))?,
                    ),
                    (
                        format!("input={i} bank=partition_fixture"),
                        check_energy_monotonic(&f, &fixture, &energy(true))?,
                    ),
                ])
            })
            .collect::<Result<_>>()?;
        let parts = parts.into_iter().flatten().collect();
        reports.push(merge_reports("energy_monotonic", "run", parts));
    }
    if let (true, Some(bank)) = (cfg.suite_selected("decay"), &bank) {
        let decay = DecayConfig {
            tree: tree.clone(),
            slack: DECAY_SLACK,
        };
        let parts: Vec<(String, VerificationReport)> = (0..cfg.decay_inputs)
            .into_par_iter()
            .map(|i| {
                let f = test_image(&cfg.shape, cfg.seed, i)?;
                let c = one_block_shift(f.plate(), &tree.pool, cfg.verify_depth);
                Ok((format!("input={i}"), check_invariance_decay(&f, &c, bank, &decay)?))
            })
            .collect::<Result<_>>()?;
        reports.push(merge_reports("invariance_decay", "input", parts));
    }
    if cfg.suite_selected("equivariance") {
        let suite_cfg = EquivarianceConfig {
            trials: cfg.equivariance_trials,
            shape: cfg.equivariance_shape.clone(),
            scales: cfg.scales,
            rotations: cfg.rotations,
            params: cfg.morlet(),
            max_depth: cfg.depth.min(2),
            policy: cfg.policy,
            spike_density: cfg.spike_density,
            seed: cfg.seed,
            sweep_scales: (1..=cfg.scales + 1).collect(),
        };
        reports.push(check_shift_equivariance_plain(&suite_cfg)?);
    }
    Ok(reports)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let known = [
        "all",
        "contraction",
        "commutation",
        "frame",
        "energy",
        "decay",
        "equivariance",
    ];
    if let Some(bad) = cfg.suites.iter().find(|s| !known.contains(&s.as_str())) {
        return Err(Error::Config(format!(
            "unknown suite {bad:?} (one of {})",
            known.join(", ")
        )));
    }
    let reports = run_suites(cfg)?;
    create_dir(&cfg.out)?;
    for r in &reports {
        write_text(&cfg.out.join(format!("verify_{}.csv", r.suite)), &r.to_csv())?;
        if let Some(t) = &r.table {
            write_text(&cfg.out.join(format!("verify_{}_table.csv", r.suite)), &t.to_csv())?;
        }
        println!("{}", r.summary_line());
    }
    write_json(&cfg.out.join("verify_config.json"), &cfg.echo())?;
    let verdicts: Vec<Verdict> = reports.iter().map(VerificationReport::verdict).collect();
    Ok(if verdicts.contains(&Verdict::Fail) {
        Outcome::Fail
    } else if verdicts.contains(&Verdict::Pass) {
        Outcome::Pass
    } else {
        Outcome::Inconclusive
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub mode: Mode,
    pub signals: usize,
    pub seconds: f64,
    pub signals_per_second: f64,
    /// Samples entering the propagation stage at each depth.
    pub samples_per_layer: Vec<usize>,
    pub total_samples: usize,
}

pub fn bench_modes(cfg: &RunConfig) -> Result<Vec<BenchRow>> {
    let bank = morlet_bank(cfg, &cfg.shape)?;
    let inputs: Vec<SignalGrid> = (0..cfg.bench_batch.max(1))
        .map(|i| test_image(&cfg.shape, cfg.seed, i))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for mode in [Mode::Plain, Mode::Maxp, Mode::Naivep] {
        let tree_cfg = cfg.tree(mode, cfg.depth);
        let start = Instant::now();
        let samples: Vec<Vec<usize>> = inputs
            .par_iter()
            .map(|f| compute_tree(f, &bank, &tree_cfg).map(|t| t.propagated_samples()))
            .collect::<Result<_>>()?;
        let seconds = start.elapsed().as_secs_f64();
        let samples_per_layer = samples[0].clone();
        rows.push(BenchRow {
            mode,
            signals: inputs.len(),
            seconds,
            signals_per_second: inputs.len() as f64 / seconds.max(f64::MIN_POSITIVE),
            total_samples: samples_per_layer.iter().sum(),
            samples_per_layer,
        });
    }
    Ok(rows)
}

pub fn cmd_bench(cfg: &RunConfig) -> Result<Outcome> {
    let rows = bench_modes(cfg)?;
    for r in &rows {
        println!(
            "{:<7} {:>4} signals  {:>10.3} signals/s  samples per layer {:?} (total {})",
            r.mode.to_string(),
            r.signals,
            r.signals_per_second,
            r.samples_per_layer,
            r.total_samples
        );
    }
    let total = |m: Mode| rows.iter().find(|r| r.mode == m).map_or(0, |r| r.total_samples);
    let (plain, maxp) = (total(Mode::Plain), total(Mode::Maxp));
    let ok = if cfg.depth == 0 { maxp == plain } else { maxp < plain };
    create_dir(&cfg.out)?;
    write_json(
        &cfg.out.join("bench.json"),
        &serde_json::json!({ "rows": rows, "maxp_fewer_samples": ok, "config": cfg.echo() }),
    )?;
    if ok {
        println!("maxp samples {maxp} vs plain {plain}: ok");
        Ok(Outcome::Pass)
    } else {
        println!("maxp samples {maxp} vs plain {plain}: expected maxp to process fewer");
        Ok(Outcome::Fail)
    }
}
