//! SARX domain types, regressor construction, switching sequences, noise
//! models and trajectory simulation.
//!
//! A SARX system with `m` subsystems evolves as
//!
//! ```text
//! y_t = w_{σ_t}ᵀ φ_t + n_t,   φ_t = [y_{t-1} … y_{t-na}, u_{t-1} … u_{t-nc}]
//! ```
//!
//! Time is 0-based throughout the crate; all lags before `t = 0` are zero.

mod mimo;
mod noise;
mod poles;
mod simulate;
mod switching;

pub use mimo::{mimo_decompose, MimoSubsystem, SisoProblem};
pub use noise::{sample_truncated_gaussian, NoiseModel};
pub use poles::{coefficients_from_poles, poles_from_coefficients, random_system_from_poles};
pub use simulate::{simulate, Trajectory, INSTABILITY_CAP};
pub use switching::{generate_switching, SwitchingPattern};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarxError};

/// Output and input lag counts. `n = na + nc` is the parameter dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemOrder {
    pub na: usize,
    pub nc: usize,
}

impl SystemOrder {
    pub fn new(na: usize, nc: usize) -> Result<Self> {
        if na + nc == 0 {
            return Err(SarxError::InvalidConfig(
                "system order na + nc must be at least 1".into(),
            ));
        }
        Ok(Self { na, nc })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.na + self.nc
    }
}

/// Coefficients of one subsystem, ordered `[a_1..a_na, c_1..c_nc]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsystemParams(pub Vec<f64>);

impl SubsystemParams {
    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarxSystem {
    pub orders: SystemOrder,
    pub subsystems: Vec<SubsystemParams>,
}

impl SarxSystem {
    /// Validates that there is at least one subsystem, that every parameter
    /// vector has length `n`, and that no two subsystems coincide.
    pub fn new(orders: SystemOrder, subsystems: Vec<SubsystemParams>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(SarxError::InvalidConfig(
                "a SARX system needs at least one subsystem".into(),
            ));
        }
        let n = orders.n();
        for (i, s) in subsystems.iter().enumerate() {
            if s.len() != n {
                return Err(SarxError::Sizing(format!(
                    "subsystem {i} has {} coefficients, expected n = {n}",
                    s.len()
                )));
            }
            if s.0.iter().any(|v| !v.is_finite()) {
                return Err(SarxError::InvalidConfig(format!(
                    "subsystem {i} has a non-finite coefficient"
                )));
            }
        }
        for i in 0..subsystems.len() {
            for j in (i + 1)..subsystems.len() {
                if subsystems[i] == subsystems[j] {
                    return Err(SarxError::InvalidConfig(format!(
                        "subsystems {i} and {j} have identical parameters"
                    )));
                }
            }
        }
        Ok(Self { orders, subsystems })
    }

    pub fn m(&self) -> usize {
        self.subsystems.len()
    }

    pub fn params(&self) -> Vec<DVector<f64>> {
        self.subsystems
            .iter()
            .map(SubsystemParams::as_vector)
            .collect()
    }
}

/// Stacks `[y_{t-1}..y_{t-na}, u_{t-1}..u_{t-nc}]`. Both histories are
/// newest-first; the caller zero-fills anything before the horizon.
pub fn build_regressor(
    orders: SystemOrder,
    y_history: &[f64],
    u_history: &[f64],
) -> Result<DVector<f64>> {
    if y_history.len() != orders.na || u_history.len() != orders.nc {
        return Err(SarxError::Sizing(format!(
            "regressor needs {} output and {} input lags, got {} and {}",
            orders.na,
            orders.nc,
            y_history.len(),
            u_history.len()
        )));
    }
    Ok(DVector::from_iterator(
        orders.n(),
        y_history.iter().chain(u_history.iter()).copied(),
    ))
}

/// Regressor at step `t` read directly from output/input sequences, with zero
/// pre-history.
pub fn regressor_at(orders: SystemOrder, y: &[f64], u: &[f64], t: usize) -> DVector<f64> {
    let lag = |seq: &[f64], k: usize| if t >= k { seq[t - k] } else { 0.0 };
    DVector::from_iterator(
        orders.n(),
        (1..=orders.na)
            .map(|k| lag(y, k))
            .chain((1..=orders.nc).map(|k| lag(u, k))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regressor_stacks_outputs_then_inputs() {
        let o = SystemOrder::new(2, 1).unwrap();
        let phi = build_regressor(o, &[5.0, 3.0], &[2.0]).unwrap();
        assert_eq!(phi.as_slice(), &[5.0, 3.0, 2.0]);
    }

    #[test]
    fn regressor_zero_history() {
        let o = SystemOrder::new(1, 1).unwrap();
        let phi = build_regressor(o, &[0.0], &[0.0]).unwrap();
        assert_eq!(phi.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn regressor_pure_exogenous() {
        let o = SystemOrder::new(0, 2).unwrap();
        let phi = build_regressor(o, &[], &[1.0, -1.0]).unwrap();
        assert_eq!(phi.as_slice(), &[1.0, -1.0]);
    }

    #[test]
    fn regressor_length_mismatch() {
        let o = SystemOrder::new(2, 1).unwrap();
        assert!(matches!(
            build_regressor(o, &[1.0], &[2.0]),
            Err(SarxError::Sizing(_))
        ));
    }

    #[test]
    fn regressor_at_zero_fills() {
        let o = SystemOrder::new(2, 1).unwrap();
        let y = [1.0, 2.0, 3.0];
        let u = [4.0, 5.0, 6.0];
        assert_eq!(regressor_at(o, &y, &u, 0).as_slice(), &[0.0, 0.0, 0.0]);
        assert_eq!(regressor_at(o, &y, &u, 1).as_slice(), &[1.0, 0.0, 4.0]);
        assert_eq!(regressor_at(o, &y, &u, 2).as_slice(), &[2.0, 1.0, 5.0]);
    }

    #[test]
    fn zero_order_rejected() {
        assert!(SystemOrder::new(0, 0).is_err());
    }

    #[test]
    fn system_validation() {
        let o = SystemOrder::new(1, 1).unwrap();
        assert!(SarxSystem::new(o, vec![]).is_err());
        assert!(SarxSystem::new(o, vec![SubsystemParams(vec![1.0])]).is_err());
        let s = SubsystemParams(vec![0.5, 1.0]);
        assert!(SarxSystem::new(o, vec![s.clone(), s.clone()]).is_err());
        assert!(SarxSystem::new(o, vec![s]).is_ok());
    }
}
