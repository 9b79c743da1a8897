//! Certified upper bound on a candidate's estimation error.
//!
//! When the last `N_C` updates of a candidate all used data from one
//! subsystem, its error is exactly `ε = b − A n` where `n` collects the
//! (unknown) noise of those data. Maximizing `‖A n − b‖` over the cube
//! `|n_j| ≤ n_max` therefore bounds `‖ε‖`; the maximum of a convex function
//! over a box sits at a vertex, so the vertices are enumerated exactly.

mod assemble;
mod monte_carlo;
mod vertices;

pub use assemble::{assemble_bound_system, column_dot, BoundComputation, ILL_CONDITIONED};
pub use monte_carlo::{mc_sample_schedule, monte_carlo_upper_bound, McDraw, McSchedule};
pub use vertices::{exact_upper_bound, EXACT_MODE_CAP};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SarxError};

/// An error upper bound. `Unbounded` is its own state and never enters
/// arithmetic as a floating-point infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ErrorBound {
    Unbounded,
    Finite(f64),
}

impl ErrorBound {
    pub fn finite(self) -> Option<f64> {
        match self {
            ErrorBound::Finite(v) => Some(v),
            ErrorBound::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, ErrorBound::Unbounded)
    }
}

impl std::fmt::Display for ErrorBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorBound::Unbounded => write!(f, "inf"),
            ErrorBound::Finite(v) => write!(f, "{v:.16e}"),
        }
    }
}

/// One bound window's contribution to a multi-window bound.
#[derive(Debug, Clone)]
pub enum WindowBound {
    NotFull,
    Ready(BoundComputation),
}

/// Largest of the per-window exact bounds. Any window that is not yet full
/// makes the combined bound `Unbounded`.
pub fn multi_window_bound(windows: &[WindowBound], n_max: f64) -> Result<ErrorBound> {
    if windows.is_empty() {
        return Err(SarxError::InvalidConfig(
            "multi-window bound needs at least one window".into(),
        ));
    }
    let mut best: f64 = 0.0;
    for w in windows {
        match w {
            WindowBound::NotFull => return Ok(ErrorBound::Unbounded),
            WindowBound::Ready(bc) => best = best.max(exact_upper_bound(bc, n_max)?),
        }
    }
    Ok(ErrorBound::Finite(best))
}

/// Combines already-computed per-window values (see [`multi_window_bound`]).
pub fn combine_window_values(values: &[ErrorBound]) -> Result<ErrorBound> {
    if values.is_empty() {
        return Err(SarxError::InvalidConfig(
            "multi-window bound needs at least one window".into(),
        ));
    }
    let mut best: f64 = 0.0;
    for v in values {
        match v {
            ErrorBound::Unbounded => return Ok(ErrorBound::Unbounded),
            ErrorBound::Finite(x) => best = best.max(*x),
        }
    }
    Ok(ErrorBound::Finite(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn bc(a: &[f64], b: f64) -> BoundComputation {
        BoundComputation {
            a: DMatrix::from_row_slice(1, a.len(), a),
            b: DVector::from_element(1, b),
            h: DVector::from_element(a.len(), 1.0),
            cond: 1.0,
        }
    }

    #[test]
    fn single_window_equals_exact() {
        let c = bc(&[1.0, 1.0], 0.0);
        let exact = exact_upper_bound(&c, 1.0).unwrap();
        let multi = multi_window_bound(&[WindowBound::Ready(c)], 1.0).unwrap();
        assert_eq!(multi, ErrorBound::Finite(exact));
    }

    #[test]
    fn max_over_windows() {
        let v = combine_window_values(&[ErrorBound::Finite(0.3), ErrorBound::Finite(0.7)]).unwrap();
        assert_eq!(v, ErrorBound::Finite(0.7));
    }

    #[test]
    fn unfull_window_is_unbounded() {
        let r = multi_window_bound(
            &[WindowBound::Ready(bc(&[1.0], 0.0)), WindowBound::NotFull],
            1.0,
        )
        .unwrap();
        assert_eq!(r, ErrorBound::Unbounded);
    }

    #[test]
    fn empty_list_rejected() {
        assert!(multi_window_bound(&[], 1.0).is_err());
        assert!(combine_window_values(&[]).is_err());
    }
}
