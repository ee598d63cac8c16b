//! `scma-codebook/1` JSON documents.
//!
//! ```json
//! {
//!   "schema": "scma-codebook/1",
//!   "M": 4, "J": 6, "K": 4,
//!   "template": "S4x6",
//!   "codebooks": [[[[re, im], ...M], ...K], ...J],
//!   "design_point": {"E": [...], "phi": [...], "omega": 3.47},
//!   "provenance": {"kind": "reference", "id": "A_4x6_M4"}
//! }
//! ```
//!
//! Complex numbers are two-element arrays. Floats are written in shortest
//! round-trip form, so save → load reproduces every entry bit for bit.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Codebook, CodebookSet, Provenance, ROUNDED_ENERGY_TOLERANCE};
use crate::error::{Error, Result};
use crate::optimizer::DesignPoint;

pub const SCHEMA: &str = "scma-codebook/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookFile {
    pub schema: String,
    #[serde(rename = "M")]
    pub order: usize,
    #[serde(rename = "J")]
    pub users: usize,
    #[serde(rename = "K")]
    pub resources: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    pub codebooks: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_point: Option<DesignPoint>,
    pub provenance: Provenance,
}

impl CodebookFile {
    pub fn from_set(set: &CodebookSet) -> Self {
        let d = set.dims();
        Self {
            schema: SCHEMA.to_string(),
            order: d.order,
            users: d.users,
            resources: d.resources,
            template: set.template().map(str::to_string),
            codebooks: set
                .codebooks()
                .iter()
                .map(|cb| {
                    cb.rows()
                        .iter()
                        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                })
                .collect(),
            design_point: set.design_point().cloned(),
            provenance: set.provenance().clone(),
        }
    }

    pub fn into_set(self, provenance: Provenance) -> Result<CodebookSet> {
        if self.schema != SCHEMA {
            return Err(Error::Schema(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                self.schema
            )));
        }
        if self.codebooks.len() != self.users {
            return Err(Error::Schema(format!(
                "J = {} but {} codebooks present",
                self.users,
                self.codebooks.len()
            )));
        }
        let mut codebooks = Vec::with_capacity(self.users);
        for (j, rows) in self.codebooks.into_iter().enumerate() {
            if rows.len() != self.resources || rows.iter().any(|r| r.len() != self.order) {
                return Err(Error::Schema(format!(
                    "codebook {} is not {}x{}",
                    j + 1,
                    self.resources,
                    self.order
                )));
            }
            let rows = rows
                .into_iter()
                .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                .collect();
            codebooks.push(Codebook::from_rows(j, rows)?);
        }
        CodebookSet::new(
            codebooks,
            self.template,
            self.design_point,
            provenance,
            ROUNDED_ENERGY_TOLERANCE,
        )
    }
}

pub fn save_codebooks(set: &CodebookSet, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&CodebookFile::from_set(set))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Read and fully validate a codebook file.
pub fn load_codebooks(path: impl AsRef<Path>) -> Result<CodebookSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let file: CodebookFile = serde_json::from_str(&text)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    file.into_set(Provenance::Loaded {
        path: path.display().to_string(),
    })
}
