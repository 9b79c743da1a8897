use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::metrics::{compute_metrics, relabel, Metrics};
use crate::error::Result;
use crate::identify::{run, Identifier, IdentifierConfig, InitStrategy};
use crate::model::{
    simulate, NoiseModel, SarxSystem, SubsystemParams, SwitchingPattern, SystemOrder,
};

/// Three subsystems; subsystem 0 dominates first, then subsystem 1, whose
/// parameters sit much closer to subsystem 0 than to the other candidates'
/// starting points.
pub fn takeover_system() -> SarxSystem {
    SarxSystem::new(
        SystemOrder::new(2, 1).expect("valid orders"),
        vec![
            SubsystemParams(vec![0.5, -0.2, 1.0]),
            SubsystemParams(vec![0.3, 0.1, 1.4]),
            SubsystemParams(vec![-0.6, 0.1, -1.5]),
        ],
    )
    .expect("valid takeover system")
}

/// Candidate 0 starts near subsystem 0; the other two start far from every
/// subsystem.
pub fn takeover_init() -> InitStrategy {
    InitStrategy::Explicit {
        estimates: vec![
            vec![0.45, -0.15, 0.9],
            vec![-2.0, 1.5, -4.0],
            vec![2.5, -1.5, 5.0],
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TakeoverOutcome {
    /// Final `‖w_0 − ŵ_0‖` with the error bound active.
    pub ours_err: f64,
    /// The same for the min-residual baseline.
    pub baseline_err: f64,
    pub ours: Metrics,
    pub baseline: Metrics,
}

/// Subsystem 0 for `first` steps, then subsystem 1 for `second` steps.
pub fn takeover_scenario(
    first: usize,
    second: usize,
    noise_std: f64,
    seed: u64,
) -> Result<TakeoverOutcome> {
    let system = takeover_system();
    let mut sequence = vec![0; first];
    sequence.extend(std::iter::repeat_n(1, second));
    let horizon = sequence.len();
    let noise = NoiseModel::TruncatedGaussian {
        std: noise_std,
        bound: 3.0 * noise_std,
    };
    let traj = simulate(
        &system,
        &SwitchingPattern::Explicit { sequence },
        &noise,
        1.0,
        horizon,
        seed,
    )?;
    let mut config = IdentifierConfig::desk(3, system.orders, 3.0 * noise_std, seed);
    config.init = takeover_init();
    let truth: Vec<DVector<f64>> = system.params();

    let go = |cfg: IdentifierConfig| -> Result<(f64, Metrics)> {
        let mut id = Identifier::new(cfg)?;
        let out = run(&mut id, &traj, Some(&system))?;
        let h = relabel(&out.estimates, &truth)?;
        let err = (&truth[0] - &out.estimates[0]).norm();
        Ok((
            err,
            compute_metrics(&out.records, &h, &out.estimates, &truth)?,
        ))
    };
    let (ours_err, ours) = go(config.clone())?;
    let (baseline_err, baseline) = go(config.baseline())?;
    Ok(TakeoverOutcome {
        ours_err,
        baseline_err,
        ours,
        baseline,
    })
}
