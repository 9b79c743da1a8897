//! Online identification of switched autoregressive exogenous (SARX) systems.
//!
//! Incoming data pairs are assigned to one of `m` candidate estimates by a
//! criterion that weighs the normalized residual against a certified upper
//! bound on each candidate's estimation error. The chosen candidate is then
//! refined with a windowed randomized Kaczmarz projection.
//!
//! Modules:
//! - [`model`]: SARX types, regressors, switching sequences, noise, simulation.
//! - [`identify`]: the streaming identifier state machine and the min-residual baseline.
//! - [`bound`]: error-upper-bound assembly, exact cube-vertex maximization, Monte Carlo variant.
//! - [`theory`]: closed-form convergence constants and bound curves.
//! - [`eval`]: relabeling, FE/CER metrics, diagnostics and the multi-realization harness.

pub mod bound;
pub mod error;
pub mod eval;
pub mod identify;
pub mod model;
pub mod seed;
pub mod theory;

pub use error::{Result, SarxError};
