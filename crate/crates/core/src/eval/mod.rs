//! Evaluation: candidate relabeling, final-error and classification metrics,
//! the min-residual baseline comparison, assumption diagnostics and the
//! multi-realization experiment harness.

mod curve;
mod diagnostics;
mod experiment;
mod metrics;
mod takeover;

pub use curve::{empirical_error_curve, ErrorCurve, SingleSystemStudy};
pub use diagnostics::{assumption_diagnostics, Diagnostics};
pub use experiment::{
    run_realization, run_realizations, write_summary_csv, ExperimentReport, ExperimentRow,
    ExperimentSetup, RealizationSummary, SystemSource,
};
pub use metrics::{compute_metrics, relabel, Metrics, RELABEL_MAX_M};
pub use takeover::{takeover_init, takeover_scenario, takeover_system, TakeoverOutcome};
