//! Closed-form constants and envelopes from the convergence analysis:
//! window spectral constants, expected-error bound curves, the order-3
//! correlation model linking poles to conditioning, and the local-convergence
//! radius and success probability.

mod correlation;
mod curves;
mod local;

pub use correlation::{
    condition_lower_bound, correlation_matrix_order3, order3_eigenvalues_from_poles,
    Order3Correlation,
};
pub use curves::{partial_bound_curves, BoundCurves, CurveInputs};
pub use local::{
    local_radius, local_success_probability, LocalRadius, SuccessProbability, TheoryInputs,
};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SarxError};

/// Constants derived from window singular-value bounds `σ_min ≤ σ_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub xi_min: f64,
    pub xi_max: f64,
    pub n: usize,
    pub window_r: usize,
}

pub fn spectral_constants(
    sigma_min: f64,
    sigma_max: f64,
    n: usize,
    window_r: usize,
) -> Result<SpectralConstants> {
    if !(sigma_min > 0.0) || !(sigma_max >= sigma_min) || !sigma_max.is_finite() {
        return Err(SarxError::InvalidConfig(format!(
            "need 0 < σ_min <= σ_max, got {sigma_min}, {sigma_max}"
        )));
    }
    if n == 0 {
        return Err(SarxError::InvalidConfig("dimension n must be >= 1".into()));
    }
    let nf = n as f64;
    let (s_lo, s_hi) = (sigma_min * sigma_min, sigma_max * sigma_max);
    Ok(SpectralConstants {
        sigma_min,
        sigma_max,
        f_min: nf.sqrt() * sigma_min,
        f_max: nf.sqrt() * sigma_max,
        kappa_min: nf.sqrt(),
        kappa_max: (((nf - 1.0) * s_hi + s_lo) / s_lo).sqrt(),
        xi_min: ((s_hi + (nf - 1.0) * s_lo) / s_hi).sqrt(),
        xi_max: nf.sqrt(),
        n,
        window_r,
    })
}

/// Constants from the eigenvalues of the regressor correlation matrix, with
/// `σ² = N_R λ`.
pub fn constants_from_correlation(
    lambda_min: f64,
    lambda_max: f64,
    n: usize,
    window_r: usize,
) -> Result<SpectralConstants> {
    if !(lambda_min > 0.0) || !(lambda_max >= lambda_min) {
        return Err(SarxError::InvalidConfig(format!(
            "need 0 < λ_min <= λ_max, got {lambda_min}, {lambda_max}"
        )));
    }
    let nr = window_r as f64;
    let c = spectral_constants(
        (nr * lambda_min).sqrt(),
        (nr * lambda_max).sqrt(),
        n,
        window_r,
    )?;
    let nf = n as f64;
    let kappa = ((nf - 1.0) * lambda_max / lambda_min + 1.0).sqrt();
    let xi = ((nf - 1.0) * lambda_min / lambda_max + 1.0).sqrt();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
    if !close(kappa, c.kappa_max) || !close(xi, c.xi_min) {
        return Err(SarxError::Internal(format!(
            "correlation constants disagree: κ {kappa} vs {}, ξ {xi} vs {}",
            c.kappa_max, c.xi_min
        )));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_case() {
        let c = spectral_constants(2.0, 2.0, 4, 4).unwrap();
        assert!((c.kappa_max - 2.0).abs() < 1e-15);
        assert!((c.xi_min - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hand_values() {
        let c = spectral_constants(1.0, 2.0, 3, 3).unwrap();
        assert!((c.kappa_max - 3.0).abs() < 1e-15);
        assert!((c.xi_min - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((c.f_min - 3f64.sqrt()).abs() < 1e-15);
        assert!((c.f_max - 2.0 * 3f64.sqrt()).abs() < 1e-15);
        let c = spectral_constants(0.3, 5.0, 1, 1).unwrap();
        assert_eq!((c.kappa_max, c.xi_min), (1.0, 1.0));
    }

    #[test]
    fn ordering_rejected() {
        assert!(spectral_constants(2.0, 1.0, 3, 3).is_err());
        assert!(spectral_constants(0.0, 1.0, 3, 3).is_err());
        assert!(constants_from_correlation(2.0, 1.0, 3, 3).is_err());
    }

    #[test]
    fn correlation_example() {
        let c = constants_from_correlation(0.624, 2.706, 3, 10).unwrap();
        assert!((c.kappa_max - 3.11).abs() < 0.01);
        assert!((c.f_min * c.f_min - 18.72).abs() < 0.01);
        let c = constants_from_correlation(1.5, 1.5, 5, 10).unwrap();
        assert!((c.kappa_max - 5f64.sqrt()).abs() < 1e-12);
    }
}
