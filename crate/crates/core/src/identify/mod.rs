//! Online identification: the robust assignment criterion and windowed
//! randomized Kaczmarz updates, one datum at a time.
//!
//! Each step scores every candidate by its normalized residual, inflated when
//! the tentative projection would move the candidate further than its error
//! bound allows. The winner takes the datum, pushes it into its window and
//! projects onto a datum sampled from that window.

mod config;
mod identifier;
mod ops;
mod run;
mod snapshot;
mod window;

pub use config::{BoundMode, IdentifierConfig, InitStrategy};
pub use identifier::{BoundEvent, Candidate, DatumSource, Identifier, StepOutcome, StepResult};
pub use ops::{
    assign, criterion_factor, kaczmarz_update, sample_window_column, sampling_weights,
    score_candidates, Scoring, StepDatum,
};
pub use run::{run, write_bound_trace_csv, write_records_csv, RunOutput, StepRecord};
pub use snapshot::{BoundJson, BoundWindowSnapshot, CandidateSnapshot, IdentifierSnapshot, Rows};
pub use window::{BoundWindow, KaczmarzWindow};
