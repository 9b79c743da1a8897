use nalgebra::Matrix3;

use crate::error::{Result, SarxError};

/// Stationary regressor correlation of `y_t = a1 y_{t−1} + a2 y_{t−2} + c1 u_{t−1} + n_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Order3Correlation {
    pub r: Matrix3<f64>,
    /// Ascending.
    pub eigenvalues: [f64; 3],
}

impl Order3Correlation {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[2]
    }
}

fn sorted(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// `R = [[(a2−1)c, −a1 c, 0], [−a1 c, (a2−1)c, 0], [0, 0, σ_u²]]` with
/// `c = (σ_n² + c1 σ_u²) / ((a2+1)(a1+a2−1)(a1−a2+1))`.
pub fn correlation_matrix_order3(
    a1: f64,
    a2: f64,
    c1: f64,
    sigma_u: f64,
    sigma_n: f64,
) -> Result<Order3Correlation> {
    let denom = (a2 + 1.0) * (a1 + a2 - 1.0) * (a1 - a2 + 1.0);
    if denom.abs() < 1e-12 {
        return Err(SarxError::PoleDegeneracy(format!(
            "a1 = {a1}, a2 = {a2} puts a pole on the unit circle"
        )));
    }
    let c = (sigma_n * sigma_n + c1 * sigma_u * sigma_u) / denom;
    let r0 = (a2 - 1.0) * c;
    let r1 = -a1 * c;
    let su2 = sigma_u * sigma_u;
    if !(r0 > 0.0) || r1.abs() >= r0 {
        return Err(SarxError::PoleDegeneracy(format!(
            "a1 = {a1}, a2 = {a2} is not a stable second-order system"
        )));
    }
    let r = Matrix3::new(r0, r1, 0.0, r1, r0, 0.0, 0.0, 0.0, su2);
    Ok(Order3Correlation {
        r,
        eigenvalues: sorted([r0 - r1, r0 + r1, su2]),
    })
}

fn check_poles(p1: f64, p2: f64) -> Result<()> {
    if !(p1.abs() < 1.0) || !(p2.abs() < 1.0) {
        return Err(SarxError::PoleDegeneracy(format!(
            "poles {p1}, {p2} must lie strictly inside the unit circle"
        )));
    }
    Ok(())
}

/// `(λ1, λ2, λ3)` written in terms of the (real) poles.
pub fn order3_eigenvalues_from_poles(p1: f64, p2: f64, c1: f64, sigma_u: f64) -> Result<[f64; 3]> {
    check_poles(p1, p2)?;
    let s = c1 * sigma_u * sigma_u;
    let base = 1.0 - p1 * p2;
    Ok([
        s / (base * (1.0 - p1) * (1.0 - p2)),
        s / (base * (1.0 + p1) * (1.0 + p2)),
        sigma_u * sigma_u,
    ])
}

/// `1 / ((1 − p1 p2)(1 − p1)(1 − p2))`, a lower bound on `λ_max / λ_min`.
pub fn condition_lower_bound(p1: f64, p2: f64) -> Result<f64> {
    check_poles(p1, p2)?;
    Ok(1.0 / ((1.0 - p1 * p2) * (1.0 - p1) * (1.0 - p2)))
}
