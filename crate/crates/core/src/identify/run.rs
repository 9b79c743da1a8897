use std::io::Write;

use nalgebra::DVector;

use super::identifier::{BoundEvent, DatumSource, Identifier, StepOutcome};
use crate::bound::ErrorBound;
use crate::error::{Result, SarxError};
use crate::model::{SarxSystem, Trajectory};

/// What one time step produced. Vectors are empty for skipped steps;
/// `errors` is empty when no ground truth was supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub true_mode: usize,
    pub assigned: Option<usize>,
    pub scores: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `‖w_i − ŵ_i‖` after the step, candidate `i` against subsystem `i`.
    pub errors: Vec<f64>,
    pub eps_u_chosen: Option<ErrorBound>,
    /// `‖w_{σ_t} − ŵ_chosen‖` after the step.
    pub chosen_true_err: Option<f64>,
    pub datum: Option<DatumSource>,
    pub bound: Option<BoundEvent>,
}

impl StepRecord {
    pub fn skipped(&self) -> bool {
        self.assigned.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<StepRecord>,
    pub estimates: Vec<DVector<f64>>,
    pub bounds: Vec<ErrorBound>,
}

impl RunOutput {
    /// Assigned mode per step, `None` where skipped.
    pub fn assignments(&self) -> Vec<Option<usize>> {
        self.records.iter().map(|r| r.assigned).collect()
    }
}

/// Streams every datum of `trajectory` through `identifier`.
pub fn run(
    identifier: &mut Identifier,
    trajectory: &Trajectory,
    truth: Option<&SarxSystem>,
) -> Result<RunOutput> {
    trajectory.check_lengths()?;
    let orders = identifier.config().orders;
    let truth_params = match truth {
        Some(sys) => {
            if sys.orders != orders {
                return Err(SarxError::Sizing(format!(
                    "true system orders {:?} differ from identifier orders {:?}",
                    sys.orders, orders
                )));
            }
            if sys.m() != identifier.config().m {
                return Err(SarxError::Sizing(format!(
                    "true system has {} subsystems, identifier has {} candidates",
                    sys.m(),
                    identifier.config().m
                )));
            }
            Some(sys.params())
        }
        None => None,
    };

    let mut records = Vec::with_capacity(trajectory.len());
    for t in 0..trajectory.len() {
        let phi = trajectory.regressor(orders, t);
        let outcome = identifier.step(&phi, trajectory.y[t])?;
        let true_mode = trajectory.modes[t];
        let errors = match &truth_params {
            Some(params) => identifier
                .candidates()
                .iter()
                .zip(params)
                .map(|(c, w)| (w - &c.w_hat).norm())
                .collect(),
            None => vec![],
        };
        let record = match outcome {
            StepOutcome::Skipped => StepRecord {
                t,
                true_mode,
                assigned: None,
                scores: vec![],
                residuals: vec![],
                errors,
                eps_u_chosen: None,
                chosen_true_err: None,
                datum: None,
                bound: None,
            },
            StepOutcome::Assigned(r) => {
                let chosen_true_err = truth_params.as_ref().and_then(|p| {
                    p.get(true_mode)
                        .map(|w| (w - &identifier.candidates()[r.chosen].w_hat).norm())
                });
                StepRecord {
                    t,
                    true_mode,
                    assigned: Some(r.chosen),
                    scores: r.scores,
                    residuals: r.residuals,
                    errors,
                    eps_u_chosen: Some(r.eps_u_after),
                    chosen_true_err,
                    datum: Some(r.datum),
                    bound: Some(r.bound),
                }
            }
        };
        records.push(record);
    }
    Ok(RunOutput {
        records,
        estimates: identifier.estimates(),
        bounds: identifier.bounds(),
    })
}

fn push_fields(line: &mut String, values: &[f64], width: usize) {
    for k in 0..width {
        line.push(',');
        if let Some(v) = values.get(k) {
            line.push_str(&format!("{v:.16e}"));
        }
    }
}

/// Per-step CSV:
/// `t,true_mode,assigned_mode,score_1..score_m,resid_1..resid_m,err_1..err_m,eps_u_chosen,skipped`.
/// Modes are 0-based; fields that do not apply are left empty.
pub fn write_records_csv<W: Write>(records: &[StepRecord], m: usize, mut out: W) -> Result<()> {
    let mut header = String::from("t,true_mode,assigned_mode");
    for prefix in ["score", "resid", "err"] {
        for i in 1..=m {
            header.push_str(&format!(",{prefix}_{i}"));
        }
    }
    header.push_str(",eps_u_chosen,skipped");
    writeln!(out, "{header}")?;
    for r in records {
        let mut line = format!(
            "{},{},{}",
            r.t,
            r.true_mode,
            r.assigned.map(|a| a.to_string()).unwrap_or_default()
        );
        push_fields(&mut line, &r.scores, m);
        push_fields(&mut line, &r.residuals, m);
        push_fields(&mut line, &r.errors, m);
        line.push(',');
        if let Some(e) = r.eps_u_chosen {
            line.push_str(&e.to_string());
        }
        line.push_str(if r.skipped() { ",1" } else { ",0" });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Bound audit CSV: `t,candidate,eps_u,true_err,cond,mode`, one row per step
/// whose chosen candidate had its bound window updated.
pub fn write_bound_trace_csv<W: Write>(records: &[StepRecord], mut out: W) -> Result<()> {
    writeln!(out, "t,candidate,eps_u,true_err,cond,mode")?;
    for r in records {
        let (Some(c), Some(bound), Some(eps)) = (r.assigned, r.bound, r.eps_u_chosen) else {
            continue;
        };
        if bound == BoundEvent::Disabled {
            continue;
        }
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t,
            c,
            eps,
            r.chosen_true_err
                .map(|e| format!("{e:.16e}"))
                .unwrap_or_default(),
            bound.cond().map(|x| format!("{x:.6e}")).unwrap_or_default(),
            bound.label()
        )?;
    }
    Ok(())
}
