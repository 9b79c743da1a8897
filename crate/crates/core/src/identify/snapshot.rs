use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::config::IdentifierConfig;
use super::identifier::{Candidate, Identifier};
use super::window::{BoundWindow, KaczmarzWindow};
use crate::bound::ErrorBound;
use crate::error::{Result, SarxError};

/// A bound in JSON: a number, or the string `"inf"` when unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundJson {
    Finite(f64),
    Text(String),
}

impl From<ErrorBound> for BoundJson {
    fn from(b: ErrorBound) -> Self {
        match b {
            ErrorBound::Finite(v) => BoundJson::Finite(v),
            ErrorBound::Unbounded => BoundJson::Text("inf".into()),
        }
    }
}

impl TryFrom<&BoundJson> for ErrorBound {
    type Error = SarxError;

    fn try_from(b: &BoundJson) -> Result<Self> {
        match b {
            BoundJson::Finite(v) => Ok(ErrorBound::Finite(*v)),
            BoundJson::Text(s) if s == "inf" => Ok(ErrorBound::Unbounded),
            BoundJson::Text(s) => Err(SarxError::Parse(format!("bad bound value {s:?}"))),
        }
    }
}

/// Matrices are stored row-major as a list of rows.
pub type Rows = Vec<Vec<f64>>;

fn to_rows(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &Rows, cols: usize) -> Result<DMatrix<f64>> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(SarxError::Parse("ragged matrix in snapshot".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundWindowSnapshot {
    pub phi: Rows,
    pub w_hist: Rows,
    pub h: Vec<f64>,
    /// Past estimates, oldest first.
    pub lag: Vec<Vec<f64>>,
    pub filled: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSnapshot {
    pub w_hat: Vec<f64>,
    pub count: usize,
    pub phi_r: Rows,
    pub y_r: Vec<f64>,
    pub eps_u: BoundJson,
    pub bound_windows: Vec<BoundWindowSnapshot>,
}

/// JSON-serializable identifier state. Random generator positions are not
/// part of it; a restored identifier restarts its streams from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifierSnapshot {
    pub config: IdentifierConfig,
    pub candidates: Vec<CandidateSnapshot>,
}

impl IdentifierSnapshot {
    pub fn capture(id: &Identifier) -> Self {
        let candidates = id
            .candidates()
            .iter()
            .map(|c| CandidateSnapshot {
                w_hat: c.w_hat.iter().copied().collect(),
                count: c.count,
                phi_r: to_rows(&c.kaczmarz.phi),
                y_r: c.kaczmarz.y.iter().copied().collect(),
                eps_u: c.eps_u.into(),
                bound_windows: c
                    .bound_windows
                    .iter()
                    .map(|b| BoundWindowSnapshot {
                        phi: to_rows(&b.phi),
                        w_hist: to_rows(&b.w_hist),
                        h: b.h.iter().copied().collect(),
                        lag: b.lag.iter().map(|v| v.iter().copied().collect()).collect(),
                        filled: b.filled,
                    })
                    .collect(),
            })
            .collect();
        Self {
            config: id.config().clone(),
            candidates,
        }
    }

    pub fn restore(&self) -> Result<Identifier> {
        let nr = self.config.window_r;
        let windows = self.config.bound_windows();
        let mut candidates = Vec::with_capacity(self.candidates.len());
        for c in &self.candidates {
            if c.bound_windows.len() != windows.len() {
                return Err(SarxError::Sizing(
                    "snapshot bound windows do not match config".into(),
                ));
            }
            let bound_windows = c
                .bound_windows
                .iter()
                .zip(&windows)
                .map(|(b, &len)| {
                    Ok(BoundWindow {
                        phi: from_rows(&b.phi, len)?,
                        w_hist: from_rows(&b.w_hist, len)?,
                        h: DVector::from_column_slice(&b.h),
                        lag: b
                            .lag
                            .iter()
                            .map(|v| DVector::from_column_slice(v))
                            .collect(),
                        filled: b.filled,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            candidates.push(Candidate {
                w_hat: DVector::from_column_slice(&c.w_hat),
                count: c.count,
                kaczmarz: KaczmarzWindow {
                    phi: from_rows(&c.phi_r, nr)?,
                    y: DVector::from_column_slice(&c.y_r),
                },
                bound_windows,
                eps_u: ErrorBound::try_from(&c.eps_u)?,
            });
        }
        Identifier::with_candidates(self.config.clone(), candidates)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
