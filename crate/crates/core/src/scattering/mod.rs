//! Scattering cascades.
//!
//! Three modes share one breadth-first evaluator:
//!
//! * `plain`: `U[p]f = |psi_m * ... |psi_1 * f||`, outputs `phi * U[p]f`.
//! * `maxp`: every modulus is followed by max-pooling, so a depth-`m` node
//!   lives on the plate `D/S^m`; the filters applied there are the same
//!   continuous filters realized on the pooled grid.
//! * `naivep`: plain outputs followed by one strided block max-pool.

mod export;
mod summary;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{FilterBank, FilterIndex};
use crate::grid::{flat_index, MultiIndex, SignalGrid, SpatialKernel};
use crate::pooling::{max_pool, partition_by_block, truncate_to_blocks, Admissibility, Pooled};

pub use export::{write_coefficients_csv, write_coefficients_sgrid, CoefficientManifest};
pub use summary::{
    count_features, dense_head_params, feature_summary, search_reported_counts, CountConfig, CountMatch,
    FeatureSummary, LayerCount, ReportedCount, REPORTED_COUNTS,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Plain,
    Maxp,
    Naivep,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Maxp => "maxp",
            Mode::Naivep => "naivep",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Mode::Plain),
            "maxp" => Ok(Mode::Maxp),
            "naivep" => Ok(Mode::Naivep),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathPolicy {
    /// All of `Lambda^m`.
    #[default]
    Full,
    /// Only paths whose scale index strictly increases (coarsening scales).
    FrequencyDecreasing,
}

impl fmt::Display for PathPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathPolicy::Full => "full",
            PathPolicy::FrequencyDecreasing => "frequency_decreasing",
        })
    }
}

impl std::str::FromStr for PathPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(PathPolicy::Full),
            "frequency_decreasing" => Ok(PathPolicy::FrequencyDecreasing),
            other => Err(Error::Config(format!("unknown path policy `{other}`"))),
        }
    }
}

impl PathPolicy {
    fn admits(self, parent: &Path, next: FilterIndex) -> bool {
        match self {
            PathPolicy::Full => true,
            PathPolicy::FrequencyDecreasing => parent.last().is_none_or(|last| next.j > last.j),
        }
    }
}

/// How convolutions are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Spectral multiplication via FFT.
    #[default]
    Fft,
    /// Direct circular sums; exactly shift-equivariant, quadratic cost.
    Direct,
}

/// A sequence of wavelet indices; the empty path selects the input itself.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path(Vec<FilterIndex>);

impl Path {
    pub fn empty() -> Self {
        Path(Vec::new())
    }

    pub fn new(entries: Vec<FilterIndex>) -> Self {
        Path(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[FilterIndex] {
        &self.0
    }

    pub fn last(&self) -> Option<FilterIndex> {
        self.0.last().copied()
    }

    pub fn child(&self, next: FilterIndex) -> Path {
        let mut entries = self.0.clone();
        entries.push(next);
        Path(entries)
    }

    /// True when every entry is a valid index for a bank with `scales` x `rotations`.
    pub fn valid_for(&self, scales: u32, rotations: u32) -> bool {
        self.0.iter().all(|i| i.j < scales && i.r < rotations)
    }
}

impl fmt::Display for Path {
    /// `root` for the empty path, otherwise `j0r0-j1r1-...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (n, idx) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("-")?;
            }
            write!(f, "j{}r{}", idx.j, idx.r)?;
        }
        Ok(())
    }
}

/// All paths of length `m` admitted by `policy`, in lexicographic order.
pub fn enumerate_paths(bank: &FilterBank, m: usize, policy: PathPolicy) -> Vec<Path> {
    let mut layer = vec![Path::empty()];
    for _ in 0..m {
        layer = layer
            .iter()
            .flat_map(|p| {
                bank.indices()
                    .filter(move |&idx| policy.admits(p, idx))
                    .map(move |idx| p.child(idx))
            })
            .collect();
    }
    layer
}

/// `U[lambda] f = |psi_lambda * f|`.
pub fn propagate_one(f: &SignalGrid, lambda: FilterIndex, bank: &FilterBank) -> Result<SignalGrid> {
    let psi = bank
        .psi(lambda)
        .ok_or_else(|| Error::InvalidBank(format!("no wavelet {lambda:?}")))?;
    Ok(f.convolve(psi)?.modulus())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolConfig {
    /// Samples per pooling block on every axis.
    pub block: usize,
    /// Pooling factor `S`.
    pub factor: f64,
    pub admissibility: Admissibility,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            block: 2,
            factor: 2.0,
            admissibility: Admissibility::Warn,
        }
    }
}

/// `P(|psi_lambda * f|)`.
pub fn propagate_pooled(f: &SignalGrid, lambda: FilterIndex, bank: &FilterBank, pool: &PoolConfig) -> Result<Pooled> {
    let u = propagate_one(f, lambda, bank)?;
    pool_signal(&u, pool)
}

fn pool_signal(u: &SignalGrid, pool: &PoolConfig) -> Result<Pooled> {
    let partition = partition_by_block(u.plate(), &vec![pool.block; u.plate().dim()])?;
    max_pool(u, &partition, pool.factor, pool.admissibility)
}

/// `phi * f` with the low-pass realized on `f`'s grid.
pub fn window(f: &SignalGrid, bank: &FilterBank) -> Result<SignalGrid> {
    if f.shape() != bank.shape() {
        return Err(Error::NoLowPass(f.shape().to_vec()));
    }
    f.convolve(bank.phi())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub mode: Mode,
    pub max_depth: usize,
    pub policy: PathPolicy,
    pub pool: PoolConfig,
    /// Block size (and stride) of the single pool applied in `naivep` mode.
    pub naive_block: usize,
    /// Keep every `2^J`-th sample of plain and naivep outputs.
    pub subsample_outputs: bool,
    pub engine: Engine,
    /// Keep propagated signals in the tree; outputs are always kept.
    pub retain_nodes: bool,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            mode: Mode::Plain,
            max_depth: 2,
            policy: PathPolicy::Full,
            pool: PoolConfig::default(),
            naive_block: 3,
            subsample_outputs: false,
            engine: Engine::Fft,
            retain_nodes: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub path: Path,
    /// `U[p]f` (or the pooled version); `None` when nodes are not retained.
    pub node: Option<SignalGrid>,
    pub output: SignalGrid,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolingStats {
    pub pooled: usize,
    pub inadmissible: usize,
}

#[derive(Clone, Debug)]
pub struct ScatteringTree {
    config: TreeConfig,
    banks: Vec<FilterBank>,
    layers: Vec<Vec<TreeNode>>,
    layer_energy: Vec<f64>,
    pooling: PoolingStats,
}

impl ScatteringTree {
    pub fn config(&self) -> &TreeConfig {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn max_depth(&self) -> usize {
        self.config.max_depth
    }

    /// Bank realized on the grid of depth-`m` nodes.
    pub fn bank_at(&self, m: usize) -> &FilterBank {
        &self.banks[m]
    }

    pub fn layer(&self, m: usize) -> &[TreeNode] {
        &self.layers[m]
    }

    pub fn layers(&self) -> &[Vec<TreeNode>] {
        &self.layers
    }

    pub fn iter(&self) -> impl Iterator<Item = &TreeNode> {
        self.layers.iter().flatten()
    }

    pub fn get(&self, path: &Path) -> Option<&TreeNode> {
        self.layers
            .get(path.len())?
            .binary_search_by(|n| n.path.cmp(path))
            .ok()
            .map(|k| &self.layers[path.len()][k])
    }

    pub fn output_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// `E_m = sum_p ||U[p] f||^2` for every depth.
    pub fn layer_energy(&self) -> &[f64] {
        &self.layer_energy
    }

    pub fn pooling_stats(&self) -> PoolingStats {
        self.pooling
    }

    /// Samples processed by the propagation stage, per depth.
    pub fn propagated_samples(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .map(|(m, layer)| layer.len() * self.banks[m].shape().iter().product::<usize>())
            .collect()
    }
}

struct LayerFilters {
    bank: FilterBank,
    psi_taps: Vec<(FilterIndex, SpatialKernel)>,
    phi_taps: Option<SpatialKernel>,
}

impl LayerFilters {
    fn new(bank: FilterBank, engine: Engine) -> Self {
        let (psi_taps, phi_taps) = match engine {
            Engine::Fft => (Vec::new(), None),
            Engine::Direct => (
                bank.wavelets().iter().map(|(idx, s)| (*idx, s.to_spatial())).collect(),
                Some(bank.phi().to_spatial()),
            ),
        };
        LayerFilters {
            bank,
            psi_taps,
            phi_taps,
        }
    }

    fn modulus(&self, f: &SignalGrid, lambda: FilterIndex) -> Result<SignalGrid> {
        if self.psi_taps.is_empty() {
            return propagate_one(f, lambda, &self.bank);
        }
        let k = self
            .psi_taps
            .binary_search_by_key(&lambda, |(i, _)| *i)
            .map_err(|_| Error::InvalidBank(format!("no wavelet {lambda:?}")))?;
        Ok(f.convolve_direct(&self.psi_taps[k].1)?.modulus())
    }

    fn window(&self, f: &SignalGrid) -> Result<SignalGrid> {
        match &self.phi_taps {
            None => window(f, &self.bank),
            Some(taps) => f.convolve_direct(taps),
        }
    }
}

/// Evaluate the cascade breadth-first up to `config.max_depth`.
pub fn compute_tree(f: &SignalGrid, bank: &FilterBank, config: &TreeConfig) -> Result<ScatteringTree> {
    if f.shape() != bank.shape() {
        return Err(Error::ShapeMismatch {
            expected: bank.shape().to_vec(),
            actual: f.shape().to_vec(),
        });
    }
    let dim = f.plate().dim();
    if config.mode == Mode::Maxp {
        let mut shape = f.shape().to_vec();
        for depth in 1..=config.max_depth {
            if config.pool.block == 0 || shape.iter().any(|n| n % config.pool.block != 0) {
                return Err(Error::at_depth(
                    depth,
                    Error::Indivisible {
                        shape,
                        divisor: format!("pooling block {}", config.pool.block),
                    },
                ));
            }
            shape.iter_mut().for_each(|n| *n /= config.pool.block);
        }
    }

    let root_spacing = f.plate().spacing();
    let mut filters = vec![LayerFilters::new(bank.clone(), config.engine)];
    let mut frontier: Vec<(Path, SignalGrid)> = vec![(Path::empty(), f.clone())];
    let mut layers_nodes: Vec<Vec<(Path, SignalGrid)>> = Vec::new();
    let mut layer_energy = vec![f.energy()];
    let mut pooling = PoolingStats::default();

    for depth in 1..=config.max_depth {
        let current = filters.last().expect("root filters");
        let jobs: Vec<(usize, FilterIndex)> = frontier
            .iter()
            .enumerate()
            .flat_map(|(k, (p, _))| {
                current
                    .bank
                    .indices()
                    .filter(move |&idx| config.policy.admits(p, idx))
                    .map(move |idx| (k, idx))
            })
            .collect();

        let children: Vec<(Path, SignalGrid, Option<bool>)> = jobs
            .par_iter()
            .map(|&(k, idx)| {
                let (parent_path, parent) = &frontier[k];
                let u = current.modulus(parent, idx)?;
                let (signal, admissible) = match config.mode {
                    Mode::Maxp => {
                        let pooled = pool_signal(&u, &config.pool)?;
                        (pooled.signal, Some(pooled.admissible))
                    }
                    _ => (u, None),
                };
                Ok((parent_path.child(idx), signal, admissible))
            })
            .collect::<Result<_>>()
            .map_err(|e| Error::at_depth(depth, e))?;

        let mut next = Vec::with_capacity(children.len());
        for (path, signal, admissible) in children {
            if let Some(ok) = admissible {
                pooling.pooled += 1;
                pooling.inadmissible += usize::from(!ok);
            }
            next.push((path, signal));
        }
        layer_energy.push(next.iter().map(|(_, s)| s.energy()).sum());

        let next_bank = match next.first() {
            Some((_, s)) if s.shape() != current.bank.shape() || config.mode == Mode::Maxp => {
                let ratio: Vec<f64> = s
                    .plate()
                    .spacing()
                    .iter()
                    .zip(&root_spacing)
                    .map(|(h, h0)| h / h0)
                    .collect();
                current
                    .bank
                    .realize(s.shape(), &ratio)
                    .map_err(|e| Error::at_depth(depth, e))?
            }
            _ => current.bank.clone(),
        };
        filters.push(LayerFilters::new(next_bank, config.engine));

        let finished = std::mem::replace(&mut frontier, next);
        layers_nodes.push(finished);
    }
    layers_nodes.push(frontier);

    let scales = bank.scales();
    let layers = layers_nodes
        .into_iter()
        .enumerate()
        .map(|(depth, nodes)| {
            let lf = &filters[depth];
            nodes
                .into_par_iter()
                .map(|(path, node)| {
                    let output = finish_output(&lf.window(&node)?, config, scales, dim)?;
                    Ok(TreeNode {
                        path,
                        node: config.retain_nodes.then_some(node),
                        output,
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::at_depth(depth, e))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScatteringTree {
        config: config.clone(),
        banks: filters.into_iter().map(|lf| lf.bank).collect(),
        layers,
        layer_energy,
        pooling,
    })
}

fn finish_output(windowed: &SignalGrid, config: &TreeConfig, scales: u32, dim: usize) -> Result<SignalGrid> {
    if config.mode == Mode::Maxp {
        return Ok(windowed.clone());
    }
    let out = if config.subsample_outputs {
        subsample(windowed, 1usize << scales)?
    } else {
        windowed.clone()
    };
    if config.mode == Mode::Naivep {
        let block = vec![config.naive_block; dim];
        let cropped = truncate_to_blocks(&out, &block)?;
        let partition = partition_by_block(cropped.plate(), &block)?;
        let pooled = max_pool(&cropped, &partition, config.naive_block as f64, Admissibility::Warn)?;
        return Ok(pooled.signal);
    }
    Ok(out)
}

/// Keep every `step`-th sample on each axis; the plate is unchanged and its
/// cells grow by `step`.
pub fn subsample(f: &SignalGrid, step: usize) -> Result<SignalGrid> {
    let shape = f.shape();
    if step == 0 || shape.iter().any(|n| n % step != 0) {
        return Err(Error::Indivisible {
            shape: shape.to_vec(),
            divisor: format!("subsampling step {step}"),
        });
    }
    let kept: Vec<usize> = shape.iter().map(|n| n / step).collect();
    let values = MultiIndex::new(&kept)
        .map(|idx| {
            let src: Vec<usize> = idx.iter().map(|i| i * step).collect();
            f.values()[flat_index(shape, &src)]
        })
        .collect();
    let plate = crate::grid::Plate::new(f.plate().origin().to_vec(), f.plate().side_lengths().to_vec(), kept)?;
    SignalGrid::new(plate, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{build_morlet_bank, MorletParams};
    use crate::grid::Plate;

    fn bank(j: u32, l: u32, n: usize) -> FilterBank {
        build_morlet_bank(j, l, &[n, n], MorletParams::default()).unwrap()
    }

    fn ramp(n: usize) -> SignalGrid {
        let vals: Vec<f64> = (0..n * n).map(|i| ((i * 37) % 11) as f64 / 10.0).collect();
        SignalGrid::from_real(Plate::unit(&[n, n]).unwrap(), &vals).unwrap()
    }

    #[test]
    fn path_counts() {
        let b = bank(2, 2, 16);
        assert_eq!(enumerate_paths(&b, 0, PathPolicy::Full), vec![Path::empty()]);
        assert_eq!(enumerate_paths(&b, 2, PathPolicy::Full).len(), 16);
        let b = bank(3, 8, 16);
        assert_eq!(enumerate_paths(&b, 2, PathPolicy::FrequencyDecreasing).len(), 192);
        assert_eq!(enumerate_paths(&b, 3, PathPolicy::FrequencyDecreasing).len(), 512);
    }

    #[test]
    fn frequency_decreasing_paths_coarsen() {
        let b = bank(3, 2, 16);
        for p in enumerate_paths(&b, 2, PathPolicy::FrequencyDecreasing) {
            assert!(p.entries()[0].j < p.entries()[1].j);
            assert!(p.valid_for(3, 2));
        }
    }

    #[test]
    fn path_display() {
        assert_eq!(Path::empty().to_string(), "root");
        let p = Path::new(vec![FilterIndex::new(0, 1), FilterIndex::new(2, 0)]);
        assert_eq!(p.to_string(), "j0r1-j2r0");
    }

    #[test]
    fn zero_in_zero_out() {
        let b = bank(2, 2, 16);
        let zero = SignalGrid::zeros(Plate::unit(&[16, 16]).unwrap());
        let idx = FilterIndex::new(1, 1);
        assert_eq!(propagate_one(&zero, idx, &b).unwrap().linf_norm(), 0.0);
        let pooled = propagate_pooled(&zero, idx, &b, &PoolConfig::default()).unwrap();
        assert_eq!(pooled.signal.linf_norm(), 0.0);
        assert_eq!(pooled.signal.plate().side_lengths(), &[0.5, 0.5]);
        assert_eq!(window(&zero, &b).unwrap().linf_norm(), 0.0);
    }

    #[test]
    fn modulus_is_nonnegative_real() {
        let b = bank(2, 2, 16);
        let u = propagate_one(&ramp(16), FilterIndex::new(0, 1), &b).unwrap();
        assert!(u.values().iter().all(|v| v.re >= 0.0 && v.im == 0.0));
    }

    #[test]
    fn pooled_equals_pool_of_modulus() {
        let b = bank(2, 2, 16);
        let f = ramp(16);
        let idx = FilterIndex::new(1, 0);
        let pooled = propagate_pooled(&f, idx, &b, &PoolConfig::default()).unwrap();
        let u = propagate_one(&f, idx, &b).unwrap();
        let part = partition_by_block(u.plate(), &[2, 2]).unwrap();
        let direct = max_pool(&u, &part, 2.0, Admissibility::Warn).unwrap();
        assert!(pooled.signal.values_bit_eq(&direct.signal));
        assert_eq!(pooled.signal.plate(), direct.signal.plate());
    }

    #[test]
    fn window_of_constant_is_dc_gain() {
        let b = bank(2, 2, 16);
        let f = SignalGrid::constant(Plate::unit(&[16, 16]).unwrap(), 0.7);
        let w = window(&f, &b).unwrap();
        let expected = 0.7 * b.phi().dc().re;
        assert!(w
            .values()
            .iter()
            .all(|v| (v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12));
        let small = SignalGrid::zeros(Plate::unit(&[8, 8]).unwrap());
        assert!(matches!(window(&small, &b), Err(Error::NoLowPass(_))));
    }

    #[test]
    fn depth_zero_tree_is_low_pass_of_input() {
        let b = bank(2, 2, 16);
        let f = ramp(16);
        let cfg = TreeConfig {
            max_depth: 0,
            ..Default::default()
        };
        let tree = compute_tree(&f, &b, &cfg).unwrap();
        assert_eq!(tree.output_count(), 1);
        let expected = window(&f, &b).unwrap();
        assert!(tree.layer(0)[0].output.values_bit_eq(&expected));
    }

    #[test]
    fn plain_tree_counts_and_lookup() {
        let b = bank(2, 2, 16);
        let cfg = TreeConfig::default();
        let tree = compute_tree(&ramp(16), &b, &cfg).unwrap();
        assert_eq!(tree.output_count(), 21);
        let p = Path::new(vec![FilterIndex::new(1, 1), FilterIndex::new(0, 0)]);
        assert_eq!(tree.get(&p).unwrap().path, p);
    }

    #[test]
    fn maxp_nodes_shrink() {
        let b = bank(2, 2, 32);
        let cfg = TreeConfig {
            mode: Mode::Maxp,
            max_depth: 2,
            ..Default::default()
        };
        let tree = compute_tree(&ramp(32), &b, &cfg).unwrap();
        for m in 0..=2 {
            for n in tree.layer(m) {
                let node = n.node.as_ref().unwrap();
                assert_eq!(node.shape(), &[32 >> m, 32 >> m]);
                assert_eq!(node.plate().side_lengths()[0], 1.0 / f64::from(1 << m));
                assert_eq!(n.output.shape(), node.shape());
            }
        }
        assert_eq!(tree.pooling_stats().pooled, 4 + 16);
    }

    #[test]
    fn maxp_divisibility_error_names_depth() {
        let b = bank(1, 1, 12);
        let cfg = TreeConfig {
            mode: Mode::Maxp,
            max_depth: 3,
            ..Default::default()
        };
        match compute_tree(&ramp(12), &b, &cfg) {
            Err(Error::AtDepth { depth, .. }) => assert_eq!(depth, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn naivep_pools_outputs_with_truncation() {
        let b = bank(2, 2, 16);
        let cfg = TreeConfig {
            mode: Mode::Naivep,
            max_depth: 1,
            ..Default::default()
        };
        let tree = compute_tree(&ramp(16), &b, &cfg).unwrap();
        for n in tree.iter() {
            assert_eq!(n.output.shape(), &[5, 5]);
            assert_eq!(n.node.as_ref().unwrap().shape(), &[16, 16]);
        }
    }

    #[test]
    fn subsampled_outputs() {
        let b = bank(2, 2, 16);
        let cfg = TreeConfig {
            max_depth: 1,
            subsample_outputs: true,
            ..Default::default()
        };
        let tree = compute_tree(&ramp(16), &b, &cfg).unwrap();
        assert!(tree.iter().all(|n| n.output.shape() == [4, 4]));
    }

    #[test]
    fn engines_agree() {
        let b = bank(1, 2, 8);
        let f = ramp(8);
        let fft = compute_tree(&f, &b, &TreeConfig::default()).unwrap();
        let direct = compute_tree(
            &f,
            &b,
            &TreeConfig {
                engine: Engine::Direct,
                ..Default::default()
            },
        )
        .unwrap();
        for (a, c) in fft.iter().zip(direct.iter()) {
            for (x, y) in a.output.values().iter().zip(c.output.values()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tree_is_deterministic() {
        let b = bank(2, 2, 16);
        let cfg = TreeConfig {
            mode: Mode::Maxp,
            ..Default::default()
        };
        let a = compute_tree(&ramp(16), &b, &cfg).unwrap();
        let c = compute_tree(&ramp(16), &b, &cfg).unwrap();
        for (x, y) in a.iter().zip(c.iter()) {
            assert!(x.output.values_bit_eq(&y.output));
        }
    }
}
