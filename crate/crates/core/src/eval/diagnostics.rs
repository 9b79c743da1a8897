use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarxError};
use crate::model::{SarxSystem, SystemOrder, Trajectory};

/// Empirical counterparts of the constants the analysis assumes known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `√λ_min` / `√λ_max` extremes of `Σ φφᵀ` over the scanned windows.
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub windows: usize,
    pub phi_max: f64,
    /// `min/max ‖φ_t‖/|n_t|` over steps with nonzero noise and regressor.
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    /// Smallest `|w_jᵀφ_t − w_iᵀφ_t|` over `i ≠ j` and nonzero regressors.
    pub psi: Option<f64>,
}

/// Scans windows `[k, k + N_R)` for `k = 0, stride, 2·stride, …`.
pub fn assumption_diagnostics(
    trajectory: &Trajectory,
    orders: SystemOrder,
    window_r: usize,
    stride: usize,
    truth: Option<&SarxSystem>,
) -> Result<Diagnostics> {
    trajectory.check_lengths()?;
    let len = trajectory.len();
    if window_r == 0 || stride == 0 || len < window_r {
        return Err(SarxError::InvalidConfig(format!(
            "diagnostics need 1 <= N_R <= T and stride >= 1 (N_R = {window_r}, T = {len}, stride = {stride})"
        )));
    }
    let n = orders.n();
    let phis: Vec<_> = (0..len).map(|t| trajectory.regressor(orders, t)).collect();

    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut windows = 0;
    for start in (0..=len - window_r).step_by(stride) {
        let mut gram = DMatrix::zeros(n, n);
        for phi in &phis[start..start + window_r] {
            gram.ger(1.0, phi, phi, 1.0);
        }
        let eig = SymmetricEigen::new(gram).eigenvalues;
        lo = lo.min(eig.min().max(0.0));
        hi = hi.max(eig.max());
        windows += 1;
    }

    let phi_max = phis.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let snr: Vec<f64> = phis
        .iter()
        .zip(&trajectory.noise)
        .filter(|(p, &e)| e != 0.0 && p.norm() > 0.0)
        .map(|(p, e)| p.norm() / e.abs())
        .collect();
    let s_min = snr.iter().copied().reduce(f64::min);
    let s_max = snr.iter().copied().reduce(f64::max);

    let psi = match truth {
        None => None,
        Some(sys) => {
            if sys.orders != orders {
                return Err(SarxError::Sizing(
                    "system orders differ from diagnostics orders".into(),
                ));
            }
            let params = sys.params();
            let mut best = f64::INFINITY;
            for phi in phis.iter().filter(|p| p.norm() > 0.0) {
                let preds: Vec<f64> = params.iter().map(|w| w.dot(phi)).collect();
                for i in 0..preds.len() {
                    for j in i + 1..preds.len() {
                        best = best.min((preds[i] - preds[j]).abs());
                    }
                }
            }
            best.is_finite().then_some(best)
        }
    };

    Ok(Diagnostics {
        sigma_min: lo.sqrt(),
        sigma_max: hi.sqrt(),
        windows,
        phi_max,
        s_min,
        s_max,
        psi,
    })
}
