use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarxError};

/// Additive output noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel {
    None,
    /// Normal(0, std²) conditioned on `|n| <= bound`.
    TruncatedGaussian {
        std: f64,
        bound: f64,
    },
    /// Unbounded; only usable with the Monte Carlo error bound.
    Gaussian {
        std: f64,
    },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::TruncatedGaussian { std, bound } => {
                if !(std >= 0.0) || !(bound > 0.0) {
                    return Err(SarxError::InvalidConfig(format!(
                        "truncated-gaussian noise needs std >= 0 and bound > 0 (got {std}, {bound})"
                    )));
                }
                Ok(())
            }
            NoiseModel::Gaussian { std } => {
                if !(std >= 0.0) {
                    return Err(SarxError::InvalidConfig(format!(
                        "gaussian noise needs std >= 0 (got {std})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Hard magnitude bound, if the model has one.
    pub fn bound(&self) -> Option<f64> {
        match *self {
            NoiseModel::None => Some(0.0),
            NoiseModel::TruncatedGaussian { bound, .. } => Some(bound),
            NoiseModel::Gaussian { .. } => None,
        }
    }

    pub fn std(&self) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::TruncatedGaussian { std, .. } | NoiseModel::Gaussian { std } => std,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::TruncatedGaussian { std, bound } => {
                sample_truncated_gaussian(std, bound, rng)
            }
            NoiseModel::Gaussian { std } => {
                if std == 0.0 {
                    0.0
                } else {
                    Normal::new(0.0, std).expect("validated std").sample(rng)
                }
            }
        }
    }
}

/// Normal(0, std²) conditioned on `|x| <= bound`, by rejection.
pub fn sample_truncated_gaussian<R: Rng + ?Sized>(std: f64, bound: f64, rng: &mut R) -> f64 {
    if std == 0.0 {
        return 0.0;
    }
    loop {
        let z: f64 = StandardNormal.sample(rng);
        let x = z * std;
        if x.abs() <= bound {
            return x;
        }
    }
}
