use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::BoundComputation;
use crate::error::{Result, SarxError};

/// Sample-count schedule `N_t ≥ ζ2 t / (2 ζ1^{2t})`, capped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSchedule {
    pub zeta1: f64,
    pub zeta2: f64,
    pub cap: usize,
}

impl McSchedule {
    pub fn new(zeta1: f64, zeta2: f64, cap: usize) -> Result<Self> {
        let s = Self { zeta1, zeta2, cap };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeta1 > 0.0 && self.zeta1 < 1.0) || !(self.zeta2 > 0.0 && self.zeta2 < 1.0) {
            return Err(SarxError::InvalidConfig(format!(
                "monte-carlo schedule needs ζ1, ζ2 in (0, 1), got {}, {}",
                self.zeta1, self.zeta2
            )));
        }
        if self.cap == 0 {
            return Err(SarxError::InvalidConfig(
                "monte-carlo sample cap must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McDraw {
    pub samples: usize,
    /// The schedule asked for more than `cap`; the probabilistic guarantee no
    /// longer applies.
    pub guarantee_void: bool,
}

/// `ceil(ζ2 t / (2 ζ1^{2t}))` clamped to the cap. Does not validate the
/// schedule's open-interval constraints.
pub fn mc_sample_schedule(t: usize, sched: &McSchedule) -> McDraw {
    let t = t.max(1);
    let denom = 2.0 * sched.zeta1.powf(2.0 * t as f64);
    let raw = sched.zeta2 * t as f64 / denom;
    let cap = sched.cap.max(1);
    if !raw.is_finite() || raw > cap as f64 {
        return McDraw {
            samples: cap,
            guarantee_void: true,
        };
    }
    McDraw {
        samples: (raw.ceil() as usize).max(1),
        guarantee_void: false,
    }
}

/// `max ‖A n⁽ⁱ⁾ − b‖` over `samples` noise vectors filled in by `sampler`.
pub fn monte_carlo_upper_bound<F>(bc: &BoundComputation, mut sampler: F, samples: usize) -> f64
where
    F: FnMut(&mut [f64]),
{
    let nc = bc.a.ncols();
    let mut noise = DVector::zeros(nc);
    let mut best: f64 = 0.0;
    for _ in 0..samples.max(1) {
        sampler(noise.as_mut_slice());
        let r = &bc.a * &noise - &bc.b;
        best = best.max(r.norm());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn bc(a: &[f64], b: f64) -> BoundComputation {
        BoundComputation {
            a: DMatrix::from_row_slice(1, a.len(), a),
            b: DVector::from_element(1, b),
            h: DVector::from_element(a.len(), 1.0),
            cond: 1.0,
        }
    }

    #[test]
    fn zero_sampler_gives_norm_b() {
        let c = bc(&[1.0, 2.0], -3.0);
        assert_eq!(monte_carlo_upper_bound(&c, |n| n.fill(0.0), 5), 3.0);
    }

    #[test]
    fn two_sample_max() {
        let c = bc(&[1.0, 1.0], 0.0);
        let mut k = 0;
        let v = monte_carlo_upper_bound(
            &c,
            |n| {
                let x = if k == 0 { 1.0 } else { 0.0 };
                n.fill(x);
                k += 1;
            },
            2,
        );
        assert_eq!(v, 2.0);
    }

    #[test]
    fn schedule_formula() {
        let s = McSchedule {
            zeta1: 0.5,
            zeta2: 1.0,
            cap: 1000,
        };
        assert_eq!(
            mc_sample_schedule(1, &s),
            McDraw {
                samples: 2,
                guarantee_void: false
            }
        );
        let s = McSchedule {
            zeta1: 0.5,
            zeta2: 0.5,
            cap: 1000,
        };
        assert_eq!(
            mc_sample_schedule(2, &s),
            McDraw {
                samples: 8,
                guarantee_void: false
            }
        );
    }

    #[test]
    fn schedule_clamps() {
        let s = McSchedule {
            zeta1: 0.5,
            zeta2: 0.5,
            cap: 100,
        };
        let d = mc_sample_schedule(50, &s);
        assert_eq!(
            d,
            McDraw {
                samples: 100,
                guarantee_void: true
            }
        );
        let d = mc_sample_schedule(100_000, &s);
        assert_eq!(
            d,
            McDraw {
                samples: 100,
                guarantee_void: true
            }
        );
    }

    #[test]
    fn schedule_validation() {
        assert!(McSchedule::new(0.5, 1.0, 10).is_err());
        assert!(McSchedule::new(0.5, 0.5, 0).is_err());
        assert!(McSchedule::new(0.9, 0.1, 10).is_ok());
    }
}
