//! JSON manifold files. The schema is documented in `docs/manifold_format.md`.

use std::path::Path;

use fracmeas_core::geom::{FlatDiskK, ManifoldShape, PointSet, SimplicialK, SphereK};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    PointSet {
        n: usize,
        #[serde(default)]
        k: Option<usize>,
        points: Vec<Vec<f64>>,
    },
    Simplicial {
        n: usize,
        k: usize,
        vertices: Vec<Vec<f64>>,
        simplices: Vec<Vec<usize>>,
    },
    Sphere {
        n: usize,
        k: usize,
        center: Vec<f64>,
        radius: f64,
        /// Defaults to the first `k + 1` coordinate axes.
        #[serde(default)]
        basis: Option<Vec<Vec<f64>>>,
    },
    FlatDisk {
        n: usize,
        k: usize,
        center: Vec<f64>,
        radius: f64,
        /// Defaults to the first `k` coordinate axes.
        #[serde(default)]
        basis: Option<Vec<Vec<f64>>>,
    },
}

fn axes(n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let mut e = vec![0.0; n];
            if i < n {
                e[i] = 1.0;
            }
            e
        })
        .collect()
}

impl ManifoldSpec {
    pub fn build(self) -> Result<ManifoldShape, CliError> {
        let shape = match self {
            Self::PointSet { n, k, points } => {
                if let Some(k) = k.filter(|k| *k != 0) {
                    return Err(CliError::Validation(format!("a point set has k = 0, not {k}")));
                }
                ManifoldShape::PointSet(PointSet::new(n, points)?)
            }
            Self::Simplicial { n, k, vertices, simplices } => {
                ManifoldShape::Simplicial(SimplicialK::new(n, k, vertices, simplices)?)
            }
            Self::Sphere { n, k, center, radius, basis } => {
                let basis = basis.unwrap_or_else(|| axes(n, k + 1));
                ManifoldShape::Sphere(SphereK::new(n, k, center, radius, basis)?)
            }
            Self::FlatDisk { n, k, center, radius, basis } => {
                let basis = basis.unwrap_or_else(|| axes(n, k));
                ManifoldShape::FlatDisk(FlatDiskK::new(n, k, center, radius, basis)?)
            }
        };
        Ok(shape)
    }
}

pub fn parse_manifold(text: &str) -> Result<ManifoldShape, CliError> {
    let spec: ManifoldSpec =
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("manifold file: {e}")))?;
    spec.build()
}

/// A parsed manifold together with the SHA-256 of the file contents.
pub struct LoadedManifold {
    pub shape: ManifoldShape,
    pub sha256: String,
}

pub fn load_manifold(path: &Path) -> Result<LoadedManifold, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(LoadedManifold {
        shape: parse_manifold(text)?,
        sha256: crate::report::sha256_hex(&bytes),
    })
}
