use serde::{Deserialize, Serialize};

use crate::bound::{McSchedule, EXACT_MODE_CAP};
use crate::error::{Result, SarxError};
use crate::model::{NoiseModel, SystemOrder};

/// How candidates start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitStrategy {
    Zeros,
    /// i.i.d. Normal(0, scale²) entries.
    Gaussian {
        scale: f64,
    },
    Explicit {
        estimates: Vec<Vec<f64>>,
    },
}

/// How (and whether) candidates maintain an error upper bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundMode {
    /// Cube-vertex maximization with the configured `noise_bound`.
    Exact,
    /// Max over sampled noise vectors drawn from `noise`.
    MonteCarlo {
        schedule: McSchedule,
        noise: NoiseModel,
    },
    /// Several bound windows; the bound is the max over them.
    MultiWindow { windows: Vec<usize> },
    /// No bound: the criterion reduces to the minimum residual (baseline).
    Disabled,
}

impl BoundMode {
    pub fn label(&self) -> &'static str {
        match self {
            BoundMode::Exact => "exact",
            BoundMode::MonteCarlo { .. } => "monte-carlo",
            BoundMode::MultiWindow { .. } => "multi-window",
            BoundMode::Disabled => "disabled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifierConfig {
    /// Number of candidates.
    pub m: usize,
    pub orders: SystemOrder,
    /// Kaczmarz window length `N_R`.
    pub window_r: usize,
    /// Bound window length `N_C`.
    pub window_c: usize,
    pub alpha: f64,
    pub beta: f64,
    pub nu: f64,
    /// Noise magnitude bound `n_max`; required by the exact and multi-window modes.
    pub noise_bound: Option<f64>,
    /// Forgetting factor `γ ∈ (0.5, 1)` biasing column sampling toward the newest datum.
    pub forgetting: Option<f64>,
    pub init: InitStrategy,
    pub bound_mode: BoundMode,
    pub seed: u64,
}

impl IdentifierConfig {
    /// Desk-scale defaults: `N_R = 3`, `N_C = 12`, `α = 4`, `β = 3`, `ν = 1e-4`,
    /// Gaussian(1) initialization, exact bounds.
    pub fn desk(m: usize, orders: SystemOrder, noise_bound: f64, seed: u64) -> Self {
        Self {
            m,
            orders,
            window_r: 3,
            window_c: 12,
            alpha: 4.0,
            beta: 3.0,
            nu: 1e-4,
            noise_bound: Some(noise_bound),
            forgetting: None,
            init: InitStrategy::Gaussian { scale: 1.0 },
            bound_mode: BoundMode::Exact,
            seed,
        }
    }

    /// The same configuration with the bound disabled (min-residual baseline).
    pub fn baseline(&self) -> Self {
        Self {
            bound_mode: BoundMode::Disabled,
            ..self.clone()
        }
    }

    /// Lengths of every bound window this configuration maintains.
    pub fn bound_windows(&self) -> Vec<usize> {
        match &self.bound_mode {
            BoundMode::Disabled => vec![],
            BoundMode::MultiWindow { windows } => windows.clone(),
            BoundMode::Exact | BoundMode::MonteCarlo { .. } => vec![self.window_c],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.orders.n();
        let bad = |msg: String| Err(SarxError::InvalidConfig(msg));
        if self.m == 0 {
            return bad("identifier needs m >= 1 candidates".into());
        }
        if n == 0 {
            return bad("system order n must be >= 1".into());
        }
        if self.window_r < n {
            return bad(format!("window_r = {} must be >= n = {n}", self.window_r));
        }
        let min_c = self.window_r * self.window_r;
        if self.window_c < min_c {
            return bad(format!(
                "window_c = {} must be >= window_r² = {min_c}",
                self.window_c
            ));
        }
        if !(self.alpha > 0.0) || !(self.beta > 0.0) || !(self.nu > 0.0) {
            return bad(format!(
                "alpha, beta, nu must be positive (got {}, {}, {})",
                self.alpha, self.beta, self.nu
            ));
        }
        if let Some(g) = self.forgetting {
            if !(g > 0.5 && g < 1.0) {
                return bad(format!("forgetting factor must lie in (0.5, 1), got {g}"));
            }
        }
        if let Some(nb) = self.noise_bound {
            if !(nb >= 0.0) || !nb.is_finite() {
                return bad(format!("noise_bound must be finite and >= 0, got {nb}"));
            }
        }
        match &self.init {
            InitStrategy::Zeros => {}
            InitStrategy::Gaussian { scale } => {
                if !(*scale >= 0.0) {
                    return bad(format!("gaussian init scale must be >= 0, got {scale}"));
                }
            }
            InitStrategy::Explicit { estimates } => {
                if estimates.len() != self.m {
                    return Err(SarxError::Sizing(format!(
                        "explicit init has {} estimates, m = {}",
                        estimates.len(),
                        self.m
                    )));
                }
                if let Some(i) = estimates.iter().position(|e| e.len() != n) {
                    return Err(SarxError::Sizing(format!(
                        "explicit init estimate {i} has length {}, n = {n}",
                        estimates[i].len()
                    )));
                }
            }
        }
        match &self.bound_mode {
            BoundMode::Exact => {
                if self.noise_bound.is_none() {
                    return bad("exact bound mode needs noise_bound".into());
                }
                if self.window_c > EXACT_MODE_CAP {
                    return Err(SarxError::ExactModeTooLarge {
                        window: self.window_c,
                        cap: EXACT_MODE_CAP,
                    });
                }
            }
            BoundMode::MultiWindow { windows } => {
                if windows.is_empty() {
                    return bad("multi-window bound mode needs at least one window".into());
                }
                if self.noise_bound.is_none() {
                    return bad("multi-window bound mode needs noise_bound".into());
                }
                for &w in windows {
                    if w < min_c {
                        return bad(format!("bound window {w} must be >= window_r² = {min_c}"));
                    }
                    if w > EXACT_MODE_CAP {
                        return Err(SarxError::ExactModeTooLarge {
                            window: w,
                            cap: EXACT_MODE_CAP,
                        });
                    }
                }
            }
            BoundMode::MonteCarlo { schedule, noise } => {
                schedule.validate()?;
                noise.validate()?;
            }
            BoundMode::Disabled => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IdentifierConfig {
        IdentifierConfig::desk(3, SystemOrder::new(2, 1).unwrap(), 3e-4, 1)
    }

    #[test]
    fn desk_defaults_validate() {
        cfg().validate().unwrap();
        cfg().baseline().validate().unwrap();
    }

    #[test]
    fn window_preconditions() {
        let mut c = cfg();
        c.window_r = 2;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.window_c = 8;
        assert!(c.validate().is_err());
    }

    #[test]
    fn exact_mode_cap() {
        let mut c = cfg();
        c.window_c = 30;
        assert!(matches!(
            c.validate(),
            Err(SarxError::ExactModeTooLarge { window: 30, .. })
        ));
    }

    #[test]
    fn forgetting_range() {
        let mut c = cfg();
        c.forgetting = Some(0.5);
        assert!(c.validate().is_err());
        c.forgetting = Some(0.9);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn exact_needs_noise_bound() {
        let mut c = cfg();
        c.noise_bound = None;
        assert!(c.validate().is_err());
        c.bound_mode = BoundMode::Disabled;
        assert!(c.validate().is_ok());
    }
}
