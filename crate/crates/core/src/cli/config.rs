use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filterbank::{MorletParams, Normalization};
use crate::pooling::Admissibility;
use crate::scattering::{Engine, Mode, PathPolicy, PoolConfig, TreeConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// One SGRID file per coefficient map plus `manifest.json`.
    #[default]
    Sgrid,
    /// A single `coefficients.csv`.
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sgrid" | "sgrid-manifest" => Ok(OutputFormat::Sgrid),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::Config(format!("unknown output format {s:?} (sgrid, csv)"))),
        }
    }
}

/// Every knob of a run. Built from defaults, then a `key = value` file, then flags.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub scales: u32,
    pub rotations: u32,
    pub sigma0: f64,
    pub xi0: f64,
    pub slant: Option<f64>,
    pub normalization: Normalization,
    /// Grid for filter export, synthetic inputs and the verification suites.
    pub shape: Vec<usize>,
    pub mode: Mode,
    pub depth: usize,
    pub verify_depth: usize,
    pub policy: PathPolicy,
    pub pool_block: usize,
    pub pool_factor: f64,
    pub admissibility: Admissibility,
    pub naive_block: usize,
    pub subsample_outputs: bool,
    pub engine: Engine,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
    pub fc_widths: Vec<usize>,
    pub n_classes: usize,
    pub suites: Vec<String>,
    pub contraction_trials: usize,
    pub contraction_shape: Vec<usize>,
    pub commutation_trials: usize,
    pub commutation_shape: Vec<usize>,
    pub spike_density: f64,
    pub frame_bound: f64,
    pub energy_inputs: usize,
    pub decay_inputs: usize,
    pub equivariance_trials: usize,
    pub equivariance_shape: Vec<usize>,
    pub bench_batch: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let morlet = MorletParams::default();
        RunConfig {
            scales: 2,
            rotations: 2,
            sigma0: morlet.sigma0,
            xi0: morlet.xi0,
            slant: None,
            normalization: morlet.normalization,
            shape: vec![64, 64],
            mode: Mode::Plain,
            depth: 2,
            verify_depth: 3,
            policy: PathPolicy::Full,
            pool_block: 2,
            pool_factor: 2.0,
            admissibility: Admissibility::Warn,
            naive_block: 3,
            subsample_outputs: false,
            engine: Engine::Fft,
            input: None,
            out: PathBuf::from("out"),
            format: OutputFormat::Sgrid,
            seed: 0,
            fc_widths: vec![512, 512, 256, 256],
            n_classes: 102,
            suites: vec!["all".into()],
            contraction_trials: 1000,
            contraction_shape: vec![16, 16],
            commutation_trials: 200,
            commutation_shape: vec![8, 8],
            spike_density: 0.3,
            frame_bound: 0.2,
            energy_inputs: 10,
            decay_inputs: 5,
            equivariance_trials: 50,
            equivariance_shape: vec![16, 16],
            bench_batch: 8,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split([',', 'x'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

fn named<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| Error::Config(format!("{key}: {e}")))
}

impl RunConfig {
    /// Set one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "scales" | "J" => self.scales = parse(key, value)?,
            "rotations" | "L" => self.rotations = parse(key, value)?,
            "sigma0" => self.sigma0 = parse(key, value)?,
            "xi0" => self.xi0 = parse(key, value)?,
            "slant" => {
                self.slant = match value {
                    "auto" | "" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "normalization" => {
                self.normalization = match value {
                    "tight" => Normalization::Tight,
                    "raw" => Normalization::Raw,
                    _ => return Err(Error::Config(format!("{key}: expected tight or raw, got {value:?}"))),
                }
            }
            "shape" => self.shape = parse_list(key, value)?,
            "mode" => self.mode = named(key, value)?,
            "depth" | "max_depth" => self.depth = parse(key, value)?,
            "verify_depth" => self.verify_depth = parse(key, value)?,
            "policy" => self.policy = named(key, value)?,
            "pool_block" => self.pool_block = parse(key, value)?,
            "pool_factor" | "S" => self.pool_factor = parse(key, value)?,
            "admissibility" => {
                self.admissibility = match value {
                    "warn" => Admissibility::Warn,
                    "strict" => Admissibility::Strict,
                    _ => return Err(Error::Config(format!("{key}: expected warn or strict, got {value:?}"))),
                }
            }
            "naive_block" => self.naive_block = parse(key, value)?,
            "subsample_outputs" => self.subsample_outputs = parse_bool(key, value)?,
            "engine" => {
                self.engine = match value {
                    "fft" => Engine::Fft,
                    "direct" => Engine::Direct,
                    _ => return Err(Error::Config(format!("{key}: expected fft or direct, got {value:?}"))),
                }
            }
            "input" => self.input = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "format" => self.format = value.parse()?,
            "seed" => self.seed = parse(key, value)?,
            "fc_widths" => self.fc_widths = parse_list(key, value)?,
            "n_classes" => self.n_classes = parse(key, value)?,
            "suites" => self.suites = value.split(',').map(|s| s.trim().to_string()).collect(),
            "contraction_trials" => self.contraction_trials = parse(key, value)?,
            "contraction_shape" => self.contraction_shape = parse_list(key, value)?,
            "commutation_trials" => self.commutation_trials = parse(key, value)?,
            "commutation_shape" => self.commutation_shape = parse_list(key, value)?,
            "spike_density" => self.spike_density = parse(key, value)?,
            "frame_bound" => self.frame_bound = parse(key, value)?,
            "energy_inputs" => self.energy_inputs = parse(key, value)?,
            "decay_inputs" => self.decay_inputs = parse(key, value)?,
            "equivariance_trials" => self.equivariance_trials = parse(key, value)?,
            "equivariance_shape" => self.equivariance_shape = parse_list(key, value)?,
            "bench_batch" => self.bench_batch = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &FsPath) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn morlet(&self) -> MorletParams {
        MorletParams {
            sigma0: self.sigma0,
            xi0: self.xi0,
            slant: self.slant,
            normalization: self.normalization,
        }
    }

    pub fn pool(&self) -> PoolConfig {
        PoolConfig {
            block: self.pool_block,
            factor: self.pool_factor,
            admissibility: self.admissibility,
        }
    }

    pub fn tree(&self, mode: Mode, max_depth: usize) -> TreeConfig {
        TreeConfig {
            mode,
            max_depth,
            policy: self.policy,
            pool: self.pool(),
            naive_block: self.naive_block,
            subsample_outputs: self.subsample_outputs,
            engine: self.engine,
            retain_nodes: false,
        }
    }

    pub fn suite_selected(&self, name: &str) -> bool {
        self.suites.iter().any(|s| s == "all" || s == name)
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
