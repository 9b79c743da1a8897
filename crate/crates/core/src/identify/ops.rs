use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::bound::ErrorBound;
use crate::error::{Result, SarxError};

/// A datum used for one Kaczmarz update, with `η = ‖φ‖⁻²`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDatum {
    pub phi: DVector<f64>,
    pub y: f64,
    pub eta: f64,
}

impl StepDatum {
    pub fn new(phi: DVector<f64>, y: f64) -> Result<Self> {
        let sq = phi.norm_squared();
        if !(sq > 0.0) {
            return Err(SarxError::DegenerateRegressor);
        }
        Ok(Self {
            phi,
            y,
            eta: 1.0 / sq,
        })
    }
}

/// Per-candidate quantities computed before assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scoring {
    pub residuals: Vec<f64>,
    pub tentative: Vec<DVector<f64>>,
    pub scores: Vec<f64>,
}

/// `max(1, α‖w̃ − ŵ‖ / (2(ε + ν)))^β`, exactly 1 when the bound is `Unbounded`.
pub fn criterion_factor(step_norm: f64, bound: ErrorBound, alpha: f64, beta: f64, nu: f64) -> f64 {
    match bound {
        ErrorBound::Unbounded => 1.0,
        ErrorBound::Finite(eps) => (alpha * step_norm / (2.0 * (eps + nu))).max(1.0).powf(beta),
    }
}

/// Residuals, tentative projections and robust scores for every candidate.
pub fn score_candidates(
    phi: &DVector<f64>,
    y: f64,
    estimates: &[DVector<f64>],
    bounds: &[ErrorBound],
    alpha: f64,
    beta: f64,
    nu: f64,
) -> Result<Scoring> {
    if estimates.len() != bounds.len() {
        return Err(SarxError::Sizing(format!(
            "{} estimates but {} bounds",
            estimates.len(),
            bounds.len()
        )));
    }
    let norm = phi.norm();
    if !(norm > 0.0) {
        return Err(SarxError::DegenerateRegressor);
    }
    let m = estimates.len();
    let mut scoring = Scoring {
        residuals: Vec::with_capacity(m),
        tentative: Vec::with_capacity(m),
        scores: Vec::with_capacity(m),
    };
    for (w, &bound) in estimates.iter().zip(bounds) {
        if w.len() != phi.len() {
            return Err(SarxError::Sizing(format!(
                "estimate length {} vs regressor length {}",
                w.len(),
                phi.len()
            )));
        }
        let err = w.dot(phi) - y;
        let r = err.abs() / norm;
        let step = phi * (err / (norm * norm));
        let tentative = w - &step;
        let factor = criterion_factor(step.norm(), bound, alpha, beta, nu);
        scoring.residuals.push(r);
        scoring.scores.push(r * factor);
        scoring.tentative.push(tentative);
    }
    Ok(scoring)
}

/// Index of the smallest score, lowest index on ties.
pub fn assign(scores: &[f64]) -> Result<usize> {
    if scores.is_empty() {
        return Err(SarxError::Internal("no scores to assign from".into()));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(SarxError::Internal(format!(
            "non-finite score {} for candidate {i}",
            scores[i]
        )));
    }
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < scores[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Column sampling probabilities. Without `gamma` they are proportional to
/// squared column norms; with it, the newest (last) column's weight is scaled
/// by `γ` and every other one by `1 − γ` before normalizing.
pub fn sampling_weights(phi_r: &DMatrix<f64>, gamma: Option<f64>) -> Result<Vec<f64>> {
    let k = phi_r.ncols();
    let mut w: Vec<f64> = phi_r.column_iter().map(|c| c.norm_squared()).collect();
    if let Some(g) = gamma {
        for (l, x) in w.iter_mut().enumerate() {
            *x *= if l + 1 == k { g } else { 1.0 - g };
        }
    }
    let total: f64 = w.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(SarxError::DegenerateRegressor);
    }
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}

/// Draws a column of the Kaczmarz window per [`sampling_weights`].
pub fn sample_window_column<R: Rng + ?Sized>(
    phi_r: &DMatrix<f64>,
    y_r: &DVector<f64>,
    gamma: Option<f64>,
    rng: &mut R,
) -> Result<(usize, StepDatum)> {
    if y_r.len() != phi_r.ncols() {
        return Err(SarxError::Sizing(format!(
            "window has {} columns but {} targets",
            phi_r.ncols(),
            y_r.len()
        )));
    }
    let weights = sampling_weights(phi_r, gamma)?;
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| SarxError::Internal(format!("sampling weights rejected: {e}")))?;
    let l = dist.sample(rng);
    let datum = StepDatum::new(phi_r.column(l).clone_owned(), y_r[l])?;
    Ok((l, datum))
}

/// Projects `w` onto the hyperplane `wᵀφ* = y*`.
pub fn kaczmarz_update(w: &DVector<f64>, datum: &StepDatum) -> Result<DVector<f64>> {
    if !(datum.eta > 0.0) || !datum.eta.is_finite() || datum.phi.len() != w.len() {
        return Err(SarxError::DegenerateRegressor);
    }
    let err = w.dot(&datum.phi) - datum.y;
    Ok(w - &datum.phi * (datum.eta * err))
}
