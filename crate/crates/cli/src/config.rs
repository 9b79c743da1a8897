//! The run configuration file.
//!
//! One TOML document drives every subcommand. Unknown keys anywhere are
//! rejected so that typos surface before any computation starts.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use sarx::identify::{BoundMode, IdentifierConfig, InitStrategy};
use sarx::model::{
    random_system_from_poles, NoiseModel, SarxSystem, SubsystemParams, SwitchingPattern,
    SystemOrder,
};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub input: InputSection,
    #[serde(default)]
    pub switching: Option<SwitchingPattern>,
    #[serde(default)]
    pub identifier: IdentifierSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub theory: Option<TheorySection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub na: usize,
    pub nc: usize,
    /// Coefficient lists `[a_1 … a_na, c_1 … c_nc]`, one per subsystem.
    #[serde(default)]
    pub subsystems: Option<Vec<Vec<f64>>>,
    /// Random second-order subsystems with real poles; needs `na = 2, nc = 1`.
    #[serde(default)]
    pub poles: Option<PoleSampling>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleSampling {
    pub m: usize,
    #[serde(default = "one")]
    pub c1: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    #[serde(default = "one")]
    pub std: f64,
}

impl Default for InputSection {
    fn default() -> Self {
        Self { std: 1.0 }
    }
}

/// Overrides on top of the desk defaults of [`IdentifierConfig::desk`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentifierSection {
    pub window_r: Option<usize>,
    pub window_c: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub nu: Option<f64>,
    /// Defaults to the noise model's hard bound.
    pub noise_bound: Option<f64>,
    pub forgetting: Option<f64>,
    pub init: Option<InitStrategy>,
    pub bound_mode: Option<BoundMode>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Grid rows; defaults to the `switching` section alone.
    #[serde(default)]
    pub patterns: Option<Vec<SwitchingPattern>>,
    /// Truncated-Gaussian standard deviations (bound `3σ`); defaults to the
    /// `noise` section alone.
    #[serde(default)]
    pub noise_levels: Option<Vec<f64>>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            realizations: default_realizations(),
            horizon: default_horizon(),
            base_seed: 0,
            patterns: None,
            noise_levels: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Also write the per-step bound trace.
    #[serde(default)]
    pub trace: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheorySection {
    /// Noise standard deviation used by the curves.
    pub sigma_n: f64,
    pub steps: usize,
    /// Expected initial squared error of the upper curve.
    pub eps0_sq: f64,
    pub phi_max: f64,
    #[serde(default)]
    pub s_min: Option<f64>,
    #[serde(default)]
    pub s_max: Option<f64>,
    /// Regressor correlation extremes; computed from the first subsystem
    /// when the system has order `(2, 1)` and these are absent.
    #[serde(default)]
    pub lambda_min: Option<f64>,
    #[serde(default)]
    pub lambda_max: Option<f64>,
    /// Separation margin for the local-convergence radius.
    #[serde(default)]
    pub psi: Option<f64>,
    #[serde(default)]
    pub n_max: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn default_realizations() -> usize {
    1
}

fn default_horizon() -> usize {
    1000
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let invalid = |msg: &str| Err(CliError::Validation(msg.to_string()));
        let sys = &self.system;
        match (&sys.subsystems, &sys.poles) {
            (Some(_), Some(_)) => {
                return invalid("system: give either `subsystems` or `poles`, not both")
            }
            (None, None) => return invalid("system: needs `subsystems` or `poles`"),
            (None, Some(_)) if sys.na != 2 || sys.nc != 1 => {
                return invalid("system.poles: pole sampling needs na = 2 and nc = 1")
            }
            (None, Some(p)) if p.m == 0 => return invalid("system.poles.m: must be >= 1"),
            _ => {}
        }
        if !(self.input.std >= 0.0) {
            return invalid("input.std: must be >= 0");
        }
        if self.experiment.realizations == 0 {
            return invalid("experiment.realizations: must be >= 1");
        }
        if let Some(levels) = &self.experiment.noise_levels {
            if levels.is_empty() || levels.iter().any(|s| !(*s > 0.0)) {
                return invalid(
                    "experiment.noise_levels: must be a non-empty list of positive values",
                );
            }
        }
        if matches!(&self.experiment.patterns, Some(p) if p.is_empty()) {
            return invalid("experiment.patterns: must not be empty");
        }
        if let Some(noise) = &self.noise {
            noise
                .validate()
                .map_err(|e| CliError::Validation(format!("noise: {e}")))?;
        }
        self.orders()?;
        Ok(())
    }

    pub fn orders(&self) -> Result<SystemOrder, CliError> {
        SystemOrder::new(self.system.na, self.system.nc)
            .map_err(|e| CliError::Validation(format!("system: {e}")))
    }

    pub fn m(&self) -> usize {
        match (&self.system.subsystems, &self.system.poles) {
            (Some(s), _) => s.len(),
            (None, Some(p)) => p.m,
            (None, None) => 0,
        }
    }

    /// The true system; pole-sampled systems are drawn from `seed`.
    pub fn build_system(&self, seed: u64) -> Result<SarxSystem, CliError> {
        let orders = self.orders()?;
        match (&self.system.subsystems, &self.system.poles) {
            (Some(list), _) => {
                SarxSystem::new(orders, list.iter().cloned().map(SubsystemParams).collect())
                    .map_err(|e| CliError::Validation(format!("system.subsystems: {e}")))
            }
            (None, Some(p)) => random_system_from_poles(p.m, p.c1, seed).map_err(CliError::from),
            (None, None) => Err(CliError::Validation(
                "system: needs `subsystems` or `poles`".into(),
            )),
        }
    }

    pub fn noise_model(&self) -> NoiseModel {
        self.noise.unwrap_or(NoiseModel::None)
    }

    pub fn switching(&self) -> SwitchingPattern {
        self.switching.clone().unwrap_or(SwitchingPattern::Fast)
    }

    /// The identifier for `m` candidates, with noise-bound fallback `noise`.
    pub fn identifier(&self, noise: &NoiseModel, seed: u64) -> Result<IdentifierConfig, CliError> {
        let sec = &self.identifier;
        let mut config = IdentifierConfig::desk(self.m(), self.orders()?, 0.0, seed);
        config.noise_bound = sec.noise_bound.or_else(|| noise.bound());
        if let Some(v) = sec.window_r {
            config.window_r = v;
        }
        if let Some(v) = sec.window_c {
            config.window_c = v;
        }
        if let Some(v) = sec.alpha {
            config.alpha = v;
        }
        if let Some(v) = sec.beta {
            config.beta = v;
        }
        if let Some(v) = sec.nu {
            config.nu = v;
        }
        config.forgetting = sec.forgetting;
        if let Some(init) = &sec.init {
            config.init = init.clone();
        }
        if let Some(mode) = &sec.bound_mode {
            config.bound_mode = mode.clone();
        }
        config
            .validate()
            .map_err(|e| CliError::from(e).context("identifier"))?;
        Ok(config)
    }

    pub fn output_dir(&self, overridden: Option<&Path>) -> PathBuf {
        overridden.map_or_else(|| self.output.dir.clone(), Path::to_path_buf)
    }
}
