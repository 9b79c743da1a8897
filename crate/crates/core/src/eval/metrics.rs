use itertools::Itertools;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarxError};
use crate::identify::StepRecord;

/// Largest `m` accepted by the exhaustive relabeling search.
pub const RELABEL_MAX_M: usize = 8;

fn total_cost(perm: &[usize], estimates: &[DVector<f64>], truth: &[DVector<f64>]) -> f64 {
    perm.iter()
        .zip(truth)
        .map(|(&cand, w)| (w - &estimates[cand]).norm())
        .sum()
}

/// The bijection `h` (subsystem `j` ↦ candidate `h[j]`) minimizing
/// `Σ_j ‖w_j − ŵ_{h(j)}‖`, searched exhaustively; ties go to the
/// lexicographically smallest permutation.
pub fn relabel(estimates: &[DVector<f64>], truth: &[DVector<f64>]) -> Result<Vec<usize>> {
    let m = truth.len();
    if estimates.len() != m {
        return Err(SarxError::Sizing(format!(
            "{} estimates for {m} subsystems",
            estimates.len()
        )));
    }
    if m > RELABEL_MAX_M {
        return Err(SarxError::InvalidConfig(format!(
            "relabeling searches all permutations and supports m <= {RELABEL_MAX_M}, got {m}"
        )));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (0..m).permutations(m) {
        let cost = total_cost(&perm, estimates, truth);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, perm));
        }
    }
    Ok(best.map(|(_, p)| p).unwrap_or_default())
}

/// Final-error and classification metrics of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `(1/m) Σ_j ‖w_j − ŵ_{h(j)}‖`.
    pub fe: f64,
    /// Fraction of assigned steps whose candidate is not `h(σ_t)`.
    pub cer: f64,
    pub relabel: Vec<usize>,
    pub mismatches: usize,
    /// Steps with a zero regressor; they carry no assignment and are left out
    /// of the classification error rate.
    pub skipped: usize,
}

pub fn compute_metrics(
    records: &[StepRecord],
    relabel: &[usize],
    estimates: &[DVector<f64>],
    truth: &[DVector<f64>],
) -> Result<Metrics> {
    let m = truth.len();
    if relabel.len() != m || estimates.len() != m {
        return Err(SarxError::Sizing(
            "relabel, estimates and truth sizes differ".into(),
        ));
    }
    let mut seen = vec![false; m];
    for &c in relabel {
        if c >= m || std::mem::replace(&mut seen[c], true) {
            return Err(SarxError::InvalidConfig(format!(
                "{relabel:?} is not a permutation"
            )));
        }
    }
    let fe = if m == 0 {
        0.0
    } else {
        total_cost(relabel, estimates, truth) / m as f64
    };
    let mut mismatches = 0;
    let mut skipped = 0;
    for r in records {
        match r.assigned {
            None => skipped += 1,
            Some(a) => {
                if relabel.get(r.true_mode) != Some(&a) {
                    mismatches += 1;
                }
            }
        }
    }
    let assigned = records.len() - skipped;
    let cer = if assigned == 0 {
        0.0
    } else {
        mismatches as f64 / assigned as f64
    };
    Ok(Metrics {
        fe,
        cer,
        relabel: relabel.to_vec(),
        mismatches,
        skipped,
    })
}
