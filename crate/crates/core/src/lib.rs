//! Windowed scattering transforms on uniform grids, with an optional
//! max-pooling stage between layers, and numerical checks of the pooling,
//! frame and translation properties of the resulting networks.
//!
//! ```
//! use scatmaxp::{build_morlet_bank, compute_tree, Mode, MorletParams, SignalGrid, Plate, TreeConfig};
//!
//! let plate = Plate::unit(&[16, 16]).unwrap();
//! let f = SignalGrid::constant(plate, 1.0);
//! let bank = build_morlet_bank(2, 2, &[16, 16], MorletParams::default()).unwrap();
//! let cfg = TreeConfig { mode: Mode::Maxp, ..Default::default() };
//! let tree = compute_tree(&f, &bank, &cfg).unwrap();
//! assert_eq!(tree.output_count(), 1 + 4 + 16);
//! assert_eq!(tree.layer(2)[0].output.shape(), &[4, 4]);
//! ```

pub mod cli;
pub mod error;
pub mod filterbank;
pub mod grid;
pub mod pooling;
pub mod scattering;
pub mod verify;

pub use error::{Error, Result};
pub use filterbank::{
    build_morlet_bank, frame_defect, shannon_partition_bank, translation_lipschitz_constant, FilterBank, FilterDesign,
    FilterIndex, MorletParams, Normalization,
};
pub use grid::{Plate, SignalGrid, Spectrum};
pub use pooling::{
    max_pool, min_admissible_factor, partition_by_block, partition_plate, sufficient_contraction_factor, Admissibility,
    Pooled,
};
pub use scattering::{
    compute_tree, enumerate_paths, feature_summary, Engine, Mode, Path, PathPolicy, PoolConfig, ScatteringTree,
    TreeConfig,
};
