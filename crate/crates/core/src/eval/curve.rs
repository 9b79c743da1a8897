use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarxError};
use crate::identify::{run, Identifier, IdentifierConfig};
use crate::model::{simulate, NoiseModel, SarxSystem, SwitchingPattern};

/// A single-subsystem identification study repeated over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleSystemStudy {
    pub system: SarxSystem,
    pub noise: NoiseModel,
    pub input_std: f64,
    pub horizon: usize,
    /// Template; each run substitutes its own seed.
    pub identifier: IdentifierConfig,
}

/// Pointwise mean of `‖w − ŵ_t‖²` across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    /// After step `t`.
    pub mean_sq: Vec<f64>,
    /// Data assigned to the candidate after step `t` (identical across runs).
    pub count: Vec<usize>,
    /// Mean initial squared error.
    pub eps0_sq: f64,
    pub runs: usize,
}

/// Mean squared error trace of a one-candidate identifier over `seeds`.
/// Every run simulates its own trajectory from its seed.
pub fn empirical_error_curve(study: &SingleSystemStudy, seeds: &[u64]) -> Result<ErrorCurve> {
    if study.system.m() != 1 || study.identifier.m != 1 {
        return Err(SarxError::InvalidConfig(
            "error curves need one subsystem and one candidate".into(),
        ));
    }
    if seeds.is_empty() {
        return Err(SarxError::InvalidConfig(
            "error curve needs at least one seed".into(),
        ));
    }
    let w = &study.system.params()[0];
    let traces = seeds
        .par_iter()
        .map(|&seed| -> Result<(Vec<f64>, Vec<usize>, f64)> {
            let traj = simulate(
                &study.system,
                &SwitchingPattern::Slow {
                    block_length: study.horizon.max(1),
                },
                &study.noise,
                study.input_std,
                study.horizon,
                seed,
            )?;
            let mut id = Identifier::new(IdentifierConfig {
                seed,
                ..study.identifier.clone()
            })?;
            let e0 = (w - &id.estimates()[0]).norm_squared();
            let out = run(&mut id, &traj, Some(&study.system))?;
            let mut count = 0;
            let counts = out
                .records
                .iter()
                .map(|r| {
                    count += usize::from(r.assigned.is_some());
                    count
                })
                .collect();
            let sq = out
                .records
                .iter()
                .map(|r| r.errors[0] * r.errors[0])
                .collect();
            Ok((sq, counts, e0))
        })
        .collect::<Result<Vec<_>>>()?;

    let runs = traces.len() as f64;
    let mut mean_sq = vec![0.0; study.horizon];
    for (sq, _, _) in &traces {
        for (acc, x) in mean_sq.iter_mut().zip(sq) {
            *acc += x / runs;
        }
    }
    Ok(ErrorCurve {
        mean_sq,
        count: traces[0].1.clone(),
        eps0_sq: traces.iter().map(|t| t.2).sum::<f64>() / runs,
        runs: traces.len(),
    })
}
