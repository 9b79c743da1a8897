use serde::{Deserialize, Serialize};

use super::SpectralConstants;
use crate::error::{Result, SarxError};

/// Inputs to the expected-squared-error envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveInputs {
    pub sigma_n: f64,
    /// SNR lower bound; `None` drops the noise term of the initial phase.
    pub s_min: Option<f64>,
    /// Expected initial squared error `E‖ε_0‖²`.
    pub eps0_sq: f64,
    /// Regressor norm bound, used by the lower curve's starting value.
    pub phi_max: f64,
    /// Forgetting factor of the sampling distribution, if any.
    pub forgetting: Option<f64>,
}

/// Lower and upper envelopes of `E‖ε‖²` indexed by the number of data `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurves {
    pub r: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower_asymptote: f64,
    pub upper_asymptote: f64,
}

/// `q^k · start + c (1 − q^k) / (1 − q)`, the closed form of `e_k = q e_{k−1} + c`.
fn geometric(q: f64, c: f64, start: f64, k: i32) -> f64 {
    let qk = q.powi(k);
    let sum = if (1.0 - q).abs() < f64::EPSILON {
        c * k as f64
    } else {
        c * (1.0 - qk) / (1.0 - q)
    };
    qk * start + sum
}

/// Envelopes for the `steps` values `r = N_R, …, N_R + steps − 1`.
///
/// Without forgetting, `upper(r) = (1−κ⁻²)^k (ε0² + (N_R−1)/S_min²) + N_R κ²/F_min² (1−(1−κ⁻²)^k) σ²`
/// and `lower(r) = (1−ξ⁻²)^k σ²/φ_max² + N_R ξ²/F_max² (1−(1−ξ⁻²)^k) σ²` with
/// `k = r − N_R + 1`. A forgetting factor `γ` scales the per-step contraction
/// and noise terms by `γ̃ = γ/(1−γ)` as in the sampling-distribution analysis.
pub fn partial_bound_curves(
    constants: &SpectralConstants,
    inputs: &CurveInputs,
    steps: usize,
) -> Result<BoundCurves> {
    let nr = constants.window_r;
    if steps < nr {
        return Err(SarxError::InvalidConfig(format!(
            "curve horizon {steps} must be >= N_R = {nr}"
        )));
    }
    if !(inputs.sigma_n >= 0.0) || !(inputs.eps0_sq >= 0.0) || !(inputs.phi_max > 0.0) {
        return Err(SarxError::InvalidConfig(
            "curve inputs need σ_n >= 0, ε0² >= 0, φ_max > 0".into(),
        ));
    }
    let g = match inputs.forgetting {
        None => 1.0,
        Some(gamma) if gamma > 0.5 && gamma < 1.0 => gamma / (1.0 - gamma),
        Some(gamma) => {
            return Err(SarxError::InvalidConfig(format!(
                "forgetting factor must lie in (0.5, 1), got {gamma}"
            )))
        }
    };
    let var = inputs.sigma_n * inputs.sigma_n;
    let nrf = nr as f64;
    let k2 = constants.kappa_max * constants.kappa_max;
    let x2 = constants.xi_min * constants.xi_min;

    let q_up = 1.0 - 1.0 / (g * k2);
    let c_up = g * nrf * var / (constants.f_min * constants.f_min);
    let q_lo = (1.0 - g / x2).max(0.0);
    let c_lo = nrf * var / (g * constants.f_max * constants.f_max);

    let start_up = inputs.eps0_sq
        + match inputs.s_min {
            Some(s) if s > 0.0 => (nrf - 1.0) / (s * s),
            _ => 0.0,
        };
    let start_lo = var / (inputs.phi_max * inputs.phi_max);

    let r: Vec<usize> = (nr..nr + steps).collect();
    let upper = r
        .iter()
        .map(|&ri| geometric(q_up, c_up, start_up, (ri - nr + 1) as i32))
        .collect();
    let lower = r
        .iter()
        .map(|&ri| geometric(q_lo, c_lo, start_lo, (ri - nr + 1) as i32))
        .collect();
    Ok(BoundCurves {
        r,
        lower,
        upper,
        lower_asymptote: c_lo / (1.0 - q_lo),
        upper_asymptote: c_up / (1.0 - q_up),
    })
}
