use std::fs;
use std::io::Write;
use std::path::Path as FsPath;

use serde::Serialize;

use super::{PoolingStats, ScatteringTree, TreeConfig};
use crate::error::{Error, Result};
use crate::grid::io::save_sgrid;
use crate::grid::Plate;

#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub id: usize,
    pub path: String,
    /// `(j, r)` pairs along the path.
    pub indices: Vec<(u32, u32)>,
    pub file: String,
    pub plate: Plate,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientManifest {
    pub tree: TreeConfig,
    pub pooling: PoolingStats,
    pub run: serde_json::Value,
    pub entries: Vec<ManifestEntry>,
}

/// Write one SGRID file per output plus `manifest.json` into `dir`.
pub fn write_coefficients_sgrid(
    tree: &ScatteringTree,
    dir: &FsPath,
    run: serde_json::Value,
) -> Result<CoefficientManifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(tree.output_count());
    for (id, node) in tree.iter().enumerate() {
        let file = format!("coeff_{id:05}_{}.sgrid", node.path);
        save_sgrid(&node.output, &dir.join(&file))?;
        entries.push(ManifestEntry {
            id,
            path: node.path.to_string(),
            indices: node.path.entries().iter().map(|i| (i.j, i.r)).collect(),
            file,
            plate: node.output.plate().clone(),
        });
    }
    let manifest = CoefficientManifest {
        tree: tree.config().clone(),
        pooling: tree.pooling_stats(),
        run,
        entries,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Flat `path_id,sample_index,value` rows (real part, 17 significant digits).
pub fn write_coefficients_csv<W: Write>(tree: &ScatteringTree, mut out: W) -> std::io::Result<()> {
    writeln!(out, "path_id,sample_index,value")?;
    for (id, node) in tree.iter().enumerate() {
        for (k, v) in node.output.values().iter().enumerate() {
            writeln!(out, "{id},{k},{:.16e}", v.re)?;
        }
    }
    Ok(())
}
