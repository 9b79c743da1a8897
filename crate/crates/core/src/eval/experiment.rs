use std::io::Write;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{compute_metrics, relabel, Metrics};
use crate::error::{Result, SarxError};
use crate::identify::{run, Identifier, IdentifierConfig};
use crate::model::{random_system_from_poles, simulate, NoiseModel, SarxSystem, SwitchingPattern};
use crate::seed::{derive_seed, Stream};

/// Where each realization's true system comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSource {
    Fixed {
        system: SarxSystem,
    },
    /// Fresh second-order subsystems per realization from uniform real poles.
    RandomPoles {
        m: usize,
        c1: f64,
    },
}

impl SystemSource {
    pub fn m(&self) -> usize {
        match self {
            SystemSource::Fixed { system } => system.m(),
            SystemSource::RandomPoles { m, .. } => *m,
        }
    }

    fn draw(&self, seed: u64) -> Result<SarxSystem> {
        match self {
            SystemSource::Fixed { system } => Ok(system.clone()),
            SystemSource::RandomPoles { m, c1 } => random_system_from_poles(*m, *c1, seed),
        }
    }
}

/// One cell of the experiment grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSetup {
    pub pattern: SwitchingPattern,
    pub noise: NoiseModel,
    pub input_std: f64,
    pub realizations: usize,
    pub horizon: usize,
    /// Template; each realization substitutes its own seed.
    pub identifier: IdentifierConfig,
    pub systems: SystemSource,
}

impl ExperimentSetup {
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 || self.horizon == 0 {
            return Err(SarxError::InvalidConfig(
                "experiment needs realizations >= 1 and horizon >= 1".into(),
            ));
        }
        if self.identifier.m != self.systems.m() {
            return Err(SarxError::InvalidConfig(format!(
                "identifier has {} candidates but the system source has {} subsystems",
                self.identifier.m,
                self.systems.m()
            )));
        }
        self.noise.validate()?;
        self.identifier.validate()
    }
}

/// Outcome of a single realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationSummary {
    pub index: usize,
    pub seed: u64,
    pub ours: Option<Metrics>,
    pub baseline: Option<Metrics>,
    /// Set when the realization could not be completed.
    pub failure: Option<String>,
}

/// Means over completed realizations, one line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub setup: String,
    pub noise: f64,
    pub fe_ours: f64,
    pub fe_base: f64,
    pub cer_ours: f64,
    pub cer_base: f64,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub row: ExperimentRow,
    pub realizations: Vec<RealizationSummary>,
}

fn run_one(
    config: &IdentifierConfig,
    system: &SarxSystem,
    traj: &crate::model::Trajectory,
) -> Result<Metrics> {
    let mut id = Identifier::new(config.clone())?;
    let out = run(&mut id, traj, Some(system))?;
    let truth: Vec<DVector<f64>> = system.params();
    let h = relabel(&out.estimates, &truth)?;
    compute_metrics(&out.records, &h, &out.estimates, &truth)
}

/// Runs realization `index`: draws the system, simulates one trajectory and
/// identifies it with both the configured identifier and the baseline.
pub fn run_realization(
    setup: &ExperimentSetup,
    base_seed: u64,
    index: usize,
) -> Result<RealizationSummary> {
    let seed = derive_seed(base_seed, Stream::Realization(index as u64));
    let attempt = || -> Result<(Metrics, Metrics)> {
        let system = setup.systems.draw(seed)?;
        let traj = simulate(
            &system,
            &setup.pattern,
            &setup.noise,
            setup.input_std,
            setup.horizon,
            seed,
        )?;
        let config = IdentifierConfig {
            seed,
            ..setup.identifier.clone()
        };
        let ours = run_one(&config, &system, &traj)?;
        let base = run_one(&config.baseline(), &system, &traj)?;
        Ok((ours, base))
    };
    match attempt() {
        Ok((ours, base)) => Ok(RealizationSummary {
            index,
            seed,
            ours: Some(ours),
            baseline: Some(base),
            failure: None,
        }),
        Err(e) if e.is_numerical() => Ok(RealizationSummary {
            index,
            seed,
            ours: None,
            baseline: None,
            failure: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// All realizations of one setup, in parallel, merged by index.
pub fn run_realizations(setup: &ExperimentSetup, base_seed: u64) -> Result<ExperimentReport> {
    setup.validate()?;
    let mut realizations = (0..setup.realizations)
        .into_par_iter()
        .map(|k| run_realization(setup, base_seed, k))
        .collect::<Result<Vec<_>>>()?;
    realizations.sort_by_key(|r| r.index);

    let done: Vec<(&Metrics, &Metrics)> = realizations
        .iter()
        .filter_map(|r| Some((r.ours.as_ref()?, r.baseline.as_ref()?)))
        .collect();
    let row = ExperimentRow {
        setup: setup.pattern.tag().to_string(),
        noise: setup.noise.std(),
        fe_ours: mean(done.iter().map(|(o, _)| o.fe)),
        fe_base: mean(done.iter().map(|(_, b)| b.fe)),
        cer_ours: mean(done.iter().map(|(o, _)| o.cer)),
        cer_base: mean(done.iter().map(|(_, b)| b.cer)),
        failed: realizations.len() - done.len(),
    };
    Ok(ExperimentReport { row, realizations })
}

/// `setup,noise,fe_ours,fe_base,cer_ours,cer_base,failed`
pub fn write_summary_csv<W: Write>(rows: &[ExperimentRow], mut out: W) -> Result<()> {
    writeln!(out, "setup,noise,fe_ours,fe_base,cer_ours,cer_base,failed")?;
    for r in rows {
        writeln!(
            out,
            "{},{:e},{:.6e},{:.6e},{:.6e},{:.6e},{}",
            r.setup, r.noise, r.fe_ours, r.fe_base, r.cer_ours, r.cer_base, r.failed
        )?;
    }
    Ok(())
}
