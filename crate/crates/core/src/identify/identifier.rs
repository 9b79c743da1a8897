use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::{BoundMode, IdentifierConfig, InitStrategy};
use super::ops::{assign, kaczmarz_update, sample_window_column, score_candidates, StepDatum};
use super::window::{BoundWindow, KaczmarzWindow};
use crate::bound::{
    assemble_bound_system, combine_window_values, exact_upper_bound, mc_sample_schedule,
    monte_carlo_upper_bound, ErrorBound, McDraw,
};
use crate::error::{Result, SarxError};
use crate::seed::{stream_rng, Stream};

/// One candidate model and its windows.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub w_hat: DVector<f64>,
    /// Number of data assigned so far (`c`).
    pub count: usize,
    pub kaczmarz: KaczmarzWindow,
    pub bound_windows: Vec<BoundWindow>,
    pub eps_u: ErrorBound,
}

impl Candidate {
    fn new(w0: DVector<f64>, window_r: usize, bound_windows: &[usize]) -> Self {
        let n = w0.len();
        Self {
            kaczmarz: KaczmarzWindow::new(n, window_r),
            bound_windows: bound_windows
                .iter()
                .map(|&len| BoundWindow::new(n, len, &w0))
                .collect(),
            w_hat: w0,
            count: 0,
            eps_u: ErrorBound::Unbounded,
        }
    }
}

/// Which datum drove the Kaczmarz update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatumSource {
    Current,
    /// Column `l` (0-based, oldest first) of the Kaczmarz window.
    Column(usize),
}

/// What happened to the chosen candidate's bound this step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundEvent {
    Disabled,
    /// Window(s) not yet full; the previous bound stands.
    NotFull,
    Computed {
        cond: f64,
        mc: Option<McDraw>,
    },
    /// Numerically unusable window; the previous bound stands.
    IllConditioned {
        cond: f64,
    },
}

impl BoundEvent {
    pub fn cond(&self) -> Option<f64> {
        match *self {
            BoundEvent::Computed { cond, .. } | BoundEvent::IllConditioned { cond } => Some(cond),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BoundEvent::Disabled => "disabled",
            BoundEvent::NotFull => "not-full",
            BoundEvent::Computed { mc: None, .. } => "computed",
            BoundEvent::Computed { mc: Some(d), .. } if d.guarantee_void => "mc-capped",
            BoundEvent::Computed { mc: Some(_), .. } => "mc",
            BoundEvent::IllConditioned { .. } => "ill-conditioned",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub chosen: usize,
    pub scores: Vec<f64>,
    pub residuals: Vec<f64>,
    pub tentative: Vec<DVector<f64>>,
    pub datum: DatumSource,
    pub eps_u_after: ErrorBound,
    pub bound: BoundEvent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    /// `φ = 0`: nothing was assigned and no state changed.
    Skipped,
    Assigned(StepResult),
}

/// The online identifier: `m` candidates fed one datum at a time.
#[derive(Debug, Clone)]
pub struct Identifier {
    config: IdentifierConfig,
    candidates: Vec<Candidate>,
    sampling_rng: ChaCha8Rng,
    mc_rng: ChaCha8Rng,
    /// Per-candidate count of bound computations, the Monte Carlo schedule's clock.
    bound_clock: Vec<usize>,
}

impl Identifier {
    pub fn new(config: IdentifierConfig) -> Result<Self> {
        config.validate()?;
        let n = config.orders.n();
        let estimates: Vec<DVector<f64>> = match &config.init {
            InitStrategy::Zeros => vec![DVector::zeros(n); config.m],
            InitStrategy::Gaussian { scale } => {
                let mut rng = stream_rng(config.seed, Stream::Init);
                let normal = Normal::new(0.0, *scale)
                    .map_err(|e| SarxError::InvalidConfig(format!("init scale: {e}")))?;
                (0..config.m)
                    .map(|_| DVector::from_fn(n, |_, _| normal.sample(&mut rng)))
                    .collect()
            }
            InitStrategy::Explicit { estimates } => estimates
                .iter()
                .map(|e| DVector::from_column_slice(e))
                .collect(),
        };
        Self::from_estimates(config, estimates)
    }

    fn from_estimates(config: IdentifierConfig, estimates: Vec<DVector<f64>>) -> Result<Self> {
        let windows = config.bound_windows();
        let candidates = estimates
            .into_iter()
            .map(|w| Candidate::new(w, config.window_r, &windows))
            .collect();
        Ok(Self {
            sampling_rng: stream_rng(config.seed, Stream::ColumnSampling),
            mc_rng: stream_rng(config.seed, Stream::MonteCarlo),
            bound_clock: vec![0; config.m],
            candidates,
            config,
        })
    }

    /// Rebuilds an identifier around restored candidate state. Random streams
    /// restart from the configured seed.
    pub fn with_candidates(config: IdentifierConfig, candidates: Vec<Candidate>) -> Result<Self> {
        config.validate()?;
        let n = config.orders.n();
        let windows = config.bound_windows();
        if candidates.len() != config.m {
            return Err(SarxError::Sizing(format!(
                "{} candidates for m = {}",
                candidates.len(),
                config.m
            )));
        }
        for c in &candidates {
            let lens: Vec<usize> = c.bound_windows.iter().map(|b| b.len()).collect();
            if c.w_hat.len() != n
                || c.kaczmarz.phi.shape() != (n, config.window_r)
                || lens != windows
                || c.bound_windows.iter().any(|b| b.phi.nrows() != n)
            {
                return Err(SarxError::Sizing(
                    "candidate state does not match configuration".into(),
                ));
            }
        }
        let mut id = Self::from_estimates(config, vec![])?;
        id.candidates = candidates;
        Ok(id)
    }

    pub fn config(&self) -> &IdentifierConfig {
        &self.config
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn estimates(&self) -> Vec<DVector<f64>> {
        self.candidates.iter().map(|c| c.w_hat.clone()).collect()
    }

    pub fn bounds(&self) -> Vec<ErrorBound> {
        self.candidates.iter().map(|c| c.eps_u).collect()
    }

    /// Processes one datum.
    pub fn step(&mut self, phi: &DVector<f64>, y: f64) -> Result<StepOutcome> {
        let n = self.config.orders.n();
        if phi.len() != n {
            return Err(SarxError::Sizing(format!(
                "regressor length {} vs n = {n}",
                phi.len()
            )));
        }
        if !y.is_finite() || phi.iter().any(|x| !x.is_finite()) {
            return Err(SarxError::Internal("non-finite datum".into()));
        }
        let estimates = self.estimates();
        let bounds = self.bounds();
        let scoring = match score_candidates(
            phi,
            y,
            &estimates,
            &bounds,
            self.config.alpha,
            self.config.beta,
            self.config.nu,
        ) {
            Ok(s) => s,
            Err(SarxError::DegenerateRegressor) => return Ok(StepOutcome::Skipped),
            Err(e) => return Err(e),
        };
        let chosen = assign(&scoring.scores)?;

        let window_r = self.config.window_r;
        let gamma = self.config.forgetting;
        let cand = &mut self.candidates[chosen];
        cand.count += 1;
        cand.kaczmarz.push(phi, y);
        let (source, datum) = if cand.count < window_r {
            (DatumSource::Current, StepDatum::new(phi.clone(), y)?)
        } else {
            let (l, d) = sample_window_column(
                &cand.kaczmarz.phi,
                &cand.kaczmarz.y,
                gamma,
                &mut self.sampling_rng,
            )?;
            (DatumSource::Column(l), d)
        };
        let w_before = cand.w_hat.clone();
        let w_after = kaczmarz_update(&w_before, &datum)?;
        cand.w_hat = w_after.clone();

        let bound = self.update_bound(chosen, &datum, &w_before, &w_after)?;
        Ok(StepOutcome::Assigned(StepResult {
            chosen,
            scores: scoring.scores,
            residuals: scoring.residuals,
            tentative: scoring.tentative,
            datum: source,
            eps_u_after: self.candidates[chosen].eps_u,
            bound,
        }))
    }

    fn update_bound(
        &mut self,
        idx: usize,
        datum: &StepDatum,
        w_before: &DVector<f64>,
        w_after: &DVector<f64>,
    ) -> Result<BoundEvent> {
        if matches!(self.config.bound_mode, BoundMode::Disabled) {
            return Ok(BoundEvent::Disabled);
        }
        let cand = &mut self.candidates[idx];
        for win in &mut cand.bound_windows {
            win.push(&datum.phi, w_before, datum.eta, w_after);
        }
        if !cand.bound_windows.iter().all(|w| w.is_full()) {
            return Ok(BoundEvent::NotFull);
        }

        let mut systems = Vec::with_capacity(cand.bound_windows.len());
        let mut worst_cond: f64 = 1.0;
        for win in &cand.bound_windows {
            let lag = win
                .lagged_estimate()
                .ok_or_else(|| SarxError::Internal("full bound window without lag".into()))?;
            match assemble_bound_system(&win.phi, &win.w_hist, &win.h, w_after, lag) {
                Ok(bc) => {
                    worst_cond = worst_cond.max(bc.cond);
                    systems.push(bc);
                }
                Err(SarxError::IllConditioned { cond }) => {
                    return Ok(BoundEvent::IllConditioned { cond });
                }
                Err(e) => return Err(e),
            }
        }

        self.bound_clock[idx] += 1;
        let clock = self.bound_clock[idx];
        let (eps, mc) = match &self.config.bound_mode {
            BoundMode::Exact | BoundMode::MultiWindow { .. } => {
                let n_max = self.config.noise_bound.ok_or_else(|| {
                    SarxError::InvalidConfig("exact bound mode needs noise_bound".into())
                })?;
                let values = systems
                    .iter()
                    .map(|bc| exact_upper_bound(bc, n_max).map(ErrorBound::Finite))
                    .collect::<Result<Vec<_>>>()?;
                (combine_window_values(&values)?, None)
            }
            BoundMode::MonteCarlo { schedule, noise } => {
                let draw = mc_sample_schedule(clock, schedule);
                let rng = &mut self.mc_rng;
                let mut best: f64 = 0.0;
                for bc in &systems {
                    let v = monte_carlo_upper_bound(
                        bc,
                        |buf: &mut [f64]| buf.iter_mut().for_each(|x| *x = noise.sample(rng)),
                        draw.samples,
                    );
                    best = best.max(v);
                }
                (ErrorBound::Finite(best), Some(draw))
            }
            BoundMode::Disabled => unreachable!("handled above"),
        };
        self.candidates[idx].eps_u = eps;
        Ok(BoundEvent::Computed {
            cond: worst_cond,
            mc,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemOrder;

    fn cfg(m: usize) -> IdentifierConfig {
        let mut c = IdentifierConfig::desk(m, SystemOrder::new(2, 1).unwrap(), 0.0, 3);
        c.init = InitStrategy::Zeros;
        c
    }

    #[test]
    fn fresh_identifier() {
        let id = Identifier::new(cfg(3)).unwrap();
        assert_eq!(id.candidates().len(), 3);
        for c in id.candidates() {
            assert_eq!(c.w_hat, DVector::zeros(3));
            assert!(c.eps_u.is_unbounded());
            assert_eq!(c.count, 0);
        }
    }

    #[test]
    fn gaussian_init_reproducible() {
        let mut c = cfg(2);
        c.init = InitStrategy::Gaussian { scale: 1.0 };
        let a = Identifier::new(c.clone()).unwrap().estimates();
        let b = Identifier::new(c).unwrap().estimates();
        assert_eq!(a, b);
        assert!(a[0].norm() > 0.0);
    }

    #[test]
    fn first_step_uses_current_datum() {
        let mut id = Identifier::new(cfg(2)).unwrap();
        let phi = DVector::from_vec(vec![1.0, 0.5, -1.0]);
        let out = id.step(&phi, 2.0).unwrap();
        let StepOutcome::Assigned(r) = out else {
            panic!("skipped")
        };
        assert_eq!(r.chosen, 0);
        assert_eq!(r.datum, DatumSource::Current);
        let c = &id.candidates()[0];
        assert_eq!(c.count, 1);
        assert_eq!(c.kaczmarz.phi.column(2).clone_owned(), phi);
        assert!((c.w_hat.dot(&phi) - 2.0).abs() < 1e-12);
        assert_eq!(id.candidates()[1].count, 0);
    }

    #[test]
    fn zero_regressor_skips() {
        let mut id = Identifier::new(cfg(2)).unwrap();
        let before = id.candidates().to_vec();
        assert_eq!(
            id.step(&DVector::zeros(3), 1.0).unwrap(),
            StepOutcome::Skipped
        );
        assert_eq!(id.candidates(), &before[..]);
    }

    #[test]
    fn wrong_regressor_length() {
        let mut id = Identifier::new(cfg(1)).unwrap();
        assert!(matches!(
            id.step(&DVector::zeros(2), 1.0),
            Err(SarxError::Sizing(_))
        ));
    }
}
