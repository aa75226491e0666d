//! Coefficient counting and dense-head parameter arithmetic.

use serde::Serialize;

use super::{Mode, PathPolicy, ScatteringTree};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerCount {
    pub depth: usize,
    pub maps: usize,
    pub samples_per_map: usize,
    pub coefficients: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeatureSummary {
    pub mode: Mode,
    pub layers: Vec<LayerCount>,
    /// Flattened feature dimension `F`.
    pub feature_dim: usize,
    pub fc_widths: Vec<usize>,
    pub n_classes: usize,
    pub head_params: u64,
}

/// Weights plus biases of a dense stack `input -> widths... -> n_classes`.
pub fn dense_head_params(input: usize, widths: &[usize], n_classes: usize) -> u64 {
    let mut sizes = Vec::with_capacity(widths.len() + 2);
    sizes.push(input as u64);
    sizes.extend(widths.iter().map(|&w| w as u64));
    sizes.push(n_classes as u64);
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

pub fn feature_summary(tree: &ScatteringTree, fc_widths: &[usize], n_classes: usize) -> FeatureSummary {
    let layers: Vec<LayerCount> = tree
        .layers()
        .iter()
        .enumerate()
        .map(|(depth, nodes)| {
            let samples_per_map = nodes.first().map_or(0, |n| n.output.values().len());
            LayerCount {
                depth,
                maps: nodes.len(),
                samples_per_map,
                coefficients: nodes.iter().map(|n| n.output.values().len()).sum(),
            }
        })
        .collect();
    let feature_dim = layers.iter().map(|l| l.coefficients).sum();
    FeatureSummary {
        mode: tree.mode(),
        layers,
        feature_dim,
        fc_widths: fc_widths.to_vec(),
        n_classes,
        head_params: dense_head_params(feature_dim, fc_widths, n_classes),
    }
}

/// A configuration whose feature dimension can be counted without running it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountConfig {
    pub mode: Mode,
    /// Side length of a square 2-D input, in samples.
    pub resolution: usize,
    pub scales: u32,
    pub rotations: u32,
    pub policy: PathPolicy,
    pub max_depth: usize,
    pub subsample_outputs: bool,
    pub pool_block: usize,
    pub naive_block: usize,
    /// Count naivep maps with a partial last block (`ceil` instead of `floor`).
    /// Counting only; the pooling itself always drops the remainder.
    pub naive_partial_blocks: bool,
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn paths_at(c: &CountConfig, m: usize) -> usize {
    let (j, l) = (c.scales as u64, c.rotations as u64);
    let count = match c.policy {
        PathPolicy::Full => (j * l).pow(m as u32),
        PathPolicy::FrequencyDecreasing => binomial(j, m as u64) * l.pow(m as u32),
    };
    count as usize
}

/// Flattened feature dimension predicted for `c`, or `None` if some grid is indivisible.
pub fn count_features(c: &CountConfig) -> Option<usize> {
    let decim = 1usize << c.scales;
    if !c.resolution.is_multiple_of(decim) {
        return None;
    }
    let mut total = 0;
    for m in 0..=c.max_depth {
        let side = match c.mode {
            Mode::Maxp => {
                let shrink = c.pool_block.checked_pow(m as u32)?;
                if !c.resolution.is_multiple_of(shrink) {
                    return None;
                }
                c.resolution / shrink
            }
            Mode::Plain | Mode::Naivep => {
                let side = if c.subsample_outputs {
                    c.resolution / decim
                } else {
                    c.resolution
                };
                if c.mode == Mode::Naivep {
                    if c.naive_partial_blocks {
                        side.div_ceil(c.naive_block)
                    } else {
                        side / c.naive_block
                    }
                } else {
                    side
                }
            }
        };
        total += paths_at(c, m) * side * side;
    }
    Some(total)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReportedCount {
    pub label: &'static str,
    pub mode: Mode,
    pub n_classes: usize,
    pub params: u64,
}

/// Parameter counts reported for the three scattering front ends with a
/// 512-512-256-256 dense head (Caltech-101 and Caltech-256).
pub const REPORTED_COUNTS: [ReportedCount; 6] = [
    ReportedCount {
        label: "caltech101/scattering",
        mode: Mode::Plain,
        n_classes: 102,
        params: 87_592_038,
    },
    ReportedCount {
        label: "caltech101/scattering-naivep",
        mode: Mode::Naivep,
        n_classes: 102,
        params: 11_596_902,
    },
    ReportedCount {
        label: "caltech101/scattering-maxp",
        mode: Mode::Maxp,
        n_classes: 102,
        params: 9_944_166,
    },
    ReportedCount {
        label: "caltech256/scattering",
        mode: Mode::Plain,
        n_classes: 257,
        params: 87_631_873,
    },
    ReportedCount {
        label: "caltech256/scattering-naivep",
        mode: Mode::Naivep,
        n_classes: 257,
        params: 11_636_737,
    },
    ReportedCount {
        label: "caltech256/scattering-maxp",
        mode: Mode::Maxp,
        n_classes: 257,
        params: 9_984_001,
    },
];

#[derive(Clone, Debug, Serialize)]
pub struct CountMatch {
    pub reported: ReportedCount,
    /// Candidates whose head parameter count equals the reported value.
    pub exact: Vec<CountConfig>,
    /// Closest candidate when nothing matches exactly.
    pub nearest: Option<(CountConfig, u64)>,
}

/// Search depth-2 configurations at `resolution` for the reported counts.
pub fn search_reported_counts(resolution: usize, fc_widths: &[usize]) -> Vec<CountMatch> {
    let mut candidates = Vec::new();
    for mode in [Mode::Plain, Mode::Maxp, Mode::Naivep] {
        for scales in 1..=6u32 {
            for rotations in 1..=8u32 {
                for policy in [PathPolicy::Full, PathPolicy::FrequencyDecreasing] {
                    for subsample_outputs in [false, true] {
                        for naive_partial_blocks in [false, true] {
                            if mode == Mode::Maxp && subsample_outputs {
                                continue;
                            }
                            if mode != Mode::Naivep && naive_partial_blocks {
                                continue;
                            }
                            candidates.push(CountConfig {
                                mode,
                                resolution,
                                scales,
                                rotations,
                                policy,
                                max_depth: 2,
                                subsample_outputs,
                                pool_block: 2,
                                naive_block: 3,
                                naive_partial_blocks,
                            });
                        }
                    }
                }
            }
        }
    }

    REPORTED_COUNTS
        .iter()
        .map(|reported| {
            let scored: Vec<(CountConfig, u64)> = candidates
                .iter()
                .filter(|c| c.mode == reported.mode)
                .filter_map(|c| {
                    count_features(c).map(|f| (c.clone(), dense_head_params(f, fc_widths, reported.n_classes)))
                })
                .collect();
            let exact: Vec<CountConfig> = scored
                .iter()
                .filter(|(_, p)| *p == reported.params)
                .map(|(c, _)| c.clone())
                .collect();
            let nearest = if exact.is_empty() {
                scored.into_iter().min_by_key(|(_, p)| p.abs_diff(reported.params))
            } else {
                None
            };
            CountMatch {
                reported: *reported,
                exact,
                nearest,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn head_arithmetic_single_coefficient() {
        let expected = 512 + 512 + 512 * 512 + 512 + 256 * 512 + 256 + 256 * 256 + 256 + 256 * 102 + 102;
        assert_eq!(dense_head_params(1, &[512, 512, 256, 256], 102), expected);
        assert_eq!(expected, 487_014);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(2, 3), 0);
    }

    #[test]
    fn plain_count_closed_form() {
        let c = CountConfig {
            mode: Mode::Plain,
            resolution: 224,
            scales: 3,
            rotations: 8,
            policy: PathPolicy::FrequencyDecreasing,
            max_depth: 2,
            subsample_outputs: true,
            pool_block: 2,
            naive_block: 3,
            naive_partial_blocks: false,
        };
        // (1 + 24 + 192) maps of 28 x 28
        assert_eq!(count_features(&c), Some(217 * 28 * 28));
        let naive = CountConfig {
            mode: Mode::Naivep,
            ..c.clone()
        };
        assert_eq!(count_features(&naive), Some(217 * 9 * 9));
        let partial = CountConfig {
            naive_partial_blocks: true,
            ..naive
        };
        assert_eq!(count_features(&partial), Some(217 * 10 * 10));
    }
}
