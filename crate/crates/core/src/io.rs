//! JSON interchange for matrices and designs, shared by the CLI and tests.
//!
//! Matrix encoding: `{"rows": n, "cols": n, "entries": [[re, im], ...]}` in
//! row-major order. Design encoding: `{"n", "g", "lambda", "weights": [
//! {"group": i, "index": j, "matrix": ...}]}` with an optional `provenance`
//! tag naming a built-in fixture. serde_json round-trips doubles exactly.

use crate::linalg::{Complex64, ComplexMatrix, LinalgError};
use crate::uwd::{UwdError, WeightDesign};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad matrix payload: {0}")]
    Matrix(#[from] LinalgError),
    #[error("bad design payload: {0}")]
    Design(#[from] UwdError),
    #[error("design table slot (group {group}, index {index}) is {problem}")]
    BadSlot {
        group: usize,
        index: usize,
        problem: &'static str,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|e| [e.re, e.im]).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = LinalgError;

    fn try_from(j: &MatrixJson) -> Result<Self, LinalgError> {
        let entries = j
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::try_new(j.rows, j.cols, entries)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightEntryJson {
    pub group: usize,
    pub index: usize,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignJson {
    pub n: usize,
    pub g: usize,
    pub lambda: usize,
    pub weights: Vec<WeightEntryJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl DesignJson {
    pub fn from_design(d: &WeightDesign, provenance: Option<String>) -> Self {
        let weights = (0..d.groups())
            .flat_map(|group| (1..=d.lambda()).map(move |index| (group, index)))
            .map(|(group, index)| WeightEntryJson {
                group,
                index,
                matrix: MatrixJson::from(d.weight(group, index)),
            })
            .collect();
        Self {
            n: d.n(),
            g: d.groups(),
            lambda: d.lambda(),
            weights,
            provenance,
        }
    }

    pub fn to_design(&self) -> Result<WeightDesign, IoError> {
        let mut table: Vec<Vec<Option<ComplexMatrix>>> = vec![vec![None; self.lambda]; self.g];
        for entry in &self.weights {
            if entry.group >= self.g || entry.index == 0 || entry.index > self.lambda {
                return Err(IoError::BadSlot {
                    group: entry.group,
                    index: entry.index,
                    problem: "out of range",
                });
            }
            let slot = &mut table[entry.group][entry.index - 1];
            if slot.is_some() {
                return Err(IoError::BadSlot {
                    group: entry.group,
                    index: entry.index,
                    problem: "duplicated",
                });
            }
            *slot = Some(ComplexMatrix::try_from(&entry.matrix)?);
        }
        let mut weights = Vec::with_capacity(self.g);
        for (group, row) in table.into_iter().enumerate() {
            let mut out = Vec::with_capacity(self.lambda);
            for (j, slot) in row.into_iter().enumerate() {
                match slot {
                    Some(m) if m.rows() == self.n && m.cols() == self.n => out.push(m),
                    Some(_) => {
                        return Err(IoError::BadSlot {
                            group,
                            index: j + 1,
                            problem: "not n x n",
                        })
                    }
                    None => {
                        return Err(IoError::BadSlot {
                            group,
                            index: j + 1,
                            problem: "missing",
                        })
                    }
                }
            }
            weights.push(out);
        }
        Ok(WeightDesign::new(weights)?)
    }
}

pub fn save_design(
    path: &Path,
    d: &WeightDesign,
    provenance: Option<String>,
) -> Result<(), IoError> {
    let json = DesignJson::from_design(d, provenance);
    std::fs::write(path, serde_json::to_string_pretty(&json)?)?;
    Ok(())
}

/// Reads a design file, returning the design and its provenance tag.
pub fn load_design(path: &Path) -> Result<(WeightDesign, Option<String>), IoError> {
    let text = std::fs::read_to_string(path)?;
    let json: DesignJson = serde_json::from_str(&text)?;
    Ok((json.to_design()?, json.provenance))
}

pub fn save_matrices(path: &Path, mats: &[ComplexMatrix]) -> Result<(), IoError> {
    let json: Vec<MatrixJson> = mats.iter().map(MatrixJson::from).collect();
    std::fs::write(path, serde_json::to_string_pretty(&json)?)?;
    Ok(())
}
