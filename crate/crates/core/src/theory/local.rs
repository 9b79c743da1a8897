use serde::{Deserialize, Serialize};

use crate::error::{Result, SarxError};

/// Problem-level constants used by the local-convergence results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryInputs {
    pub sigma_n: f64,
    pub s_min: f64,
    pub s_max: Option<f64>,
    pub phi_max: f64,
    /// Subsystem separation margin.
    pub psi: f64,
    pub n_max: f64,
    pub eps0: f64,
    pub nu: f64,
    pub m: usize,
}

impl TheoryInputs {
    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.sigma_n,
            self.s_min,
            self.phi_max,
            self.psi,
            self.n_max,
            self.eps0,
            self.nu,
        ];
        if vals.iter().any(|v| !(*v >= 0.0)) || self.s_max.is_some_and(|s| !(s >= 0.0)) {
            return Err(SarxError::InvalidConfig(
                "theory inputs must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// A warning when the SNR upper bound violates `S_max <= κ_max S_min`.
    pub fn snr_ratio_warning(&self, kappa_max: f64) -> Option<String> {
        let s_max = self.s_max?;
        (s_max > kappa_max * self.s_min).then(|| {
            format!(
                "S_max = {s_max} exceeds κ_max·S_min = {}; the local-convergence probability does not apply",
                kappa_max * self.s_min
            )
        })
    }

    pub fn radius(&self) -> LocalRadius {
        local_radius(self.psi, self.phi_max, self.n_max, self.nu, self.s_min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalRadius {
    pub value: f64,
    /// False when the separation margin is too small for a positive radius.
    pub applicable: bool,
}

/// `ε′ = (ψ − n_max/(ν S_min) − 3 n_max) / (2 φ_max)`.
pub fn local_radius(psi: f64, phi_max: f64, n_max: f64, nu: f64, s_min: f64) -> LocalRadius {
    let snr_term = if n_max == 0.0 {
        0.0
    } else {
        n_max / (nu * s_min)
    };
    let value = (psi - snr_term - 3.0 * n_max) / (2.0 * phi_max);
    LocalRadius {
        value,
        applicable: value > 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessProbability {
    /// Clamped to `[0, 1]`.
    pub probability: f64,
    pub unclamped: f64,
    /// Whether `√(N_R (ε0² + N_R/S_min²)) <= ε′` holds.
    pub precondition: bool,
}

/// `1 − 2m √(N_R/ε′² (ε0² + N_R/S_min²))`; `s_min = None` is the noiseless form.
pub fn local_success_probability(
    m: usize,
    window_r: usize,
    eps0: f64,
    s_min: Option<f64>,
    eps_prime: f64,
) -> SuccessProbability {
    let nr = window_r as f64;
    let inner = eps0 * eps0 + s_min.map_or(0.0, |s| nr / (s * s));
    let unclamped = if eps_prime > 0.0 {
        1.0 - 2.0 * m as f64 * (nr / (eps_prime * eps_prime) * inner).sqrt()
    } else {
        f64::NEG_INFINITY
    };
    SuccessProbability {
        probability: unclamped.clamp(0.0, 1.0),
        unclamped,
        precondition: eps_prime > 0.0 && (nr * inner).sqrt() <= eps_prime,
    }
}
