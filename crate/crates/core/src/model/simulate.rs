use std::io::{BufRead, Write};

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{generate_switching, NoiseModel, SarxSystem, SwitchingPattern, SystemOrder};
use crate::error::{Result, SarxError};
use crate::seed::{stream_rng, Stream};

/// `|y_t|` above this aborts a simulation.
pub const INSTABILITY_CAP: f64 = 1e12;

/// A simulated or ingested data stream. All sequences share the same length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub modes: Vec<usize>,
    pub noise: Vec<f64>,
}

/// `wᵀφ_t` read straight out of the sequences; shared by simulation and replay
/// so both produce the same bits.
fn predict(orders: SystemOrder, w: &[f64], y: &[f64], u: &[f64], t: usize) -> f64 {
    let mut acc = 0.0;
    for k in 1..=orders.na {
        if t >= k {
            acc += w[k - 1] * y[t - k];
        }
    }
    for k in 1..=orders.nc {
        if t >= k {
            acc += w[orders.na + k - 1] * u[t - k];
        }
    }
    acc
}

/// Simulates `horizon` steps with i.i.d. Normal(0, input_std²) inputs and zero
/// pre-history. Deterministic in `seed`.
pub fn simulate(
    system: &SarxSystem,
    pattern: &SwitchingPattern,
    noise: &NoiseModel,
    input_std: f64,
    horizon: usize,
    seed: u64,
) -> Result<Trajectory> {
    noise.validate()?;
    if !(input_std >= 0.0) {
        return Err(SarxError::InvalidConfig(format!(
            "input std must be >= 0 (got {input_std})"
        )));
    }
    let modes = generate_switching(pattern, system.m(), horizon, seed)?;
    let mut rng = stream_rng(seed, Stream::Simulation);
    let input = Normal::new(0.0, input_std.max(0.0)).expect("validated std");

    let mut u = Vec::with_capacity(horizon);
    let mut y = Vec::with_capacity(horizon);
    let mut n = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let ut = if input_std == 0.0 {
            0.0
        } else {
            input.sample(&mut rng)
        };
        let nt = noise.sample(&mut rng);
        let w = &system.subsystems[modes[t]].0;
        let yt = predict(system.orders, w, &y, &u, t) + nt;
        if !yt.is_finite() || yt.abs() > INSTABILITY_CAP {
            return Err(SarxError::Instability {
                step: t,
                magnitude: yt.abs(),
            });
        }
        u.push(ut);
        y.push(yt);
        n.push(nt);
    }
    Ok(Trajectory {
        u,
        y,
        modes,
        noise: n,
    })
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn check_lengths(&self) -> Result<()> {
        let t = self.y.len();
        if self.u.len() != t || self.modes.len() != t || self.noise.len() != t {
            return Err(SarxError::Sizing(
                "trajectory sequences differ in length".into(),
            ));
        }
        Ok(())
    }

    /// Recomputes every output from the stored inputs, modes and noise.
    pub fn replay(&self, system: &SarxSystem) -> Result<Vec<f64>> {
        self.check_lengths()?;
        let mut y = Vec::with_capacity(self.len());
        for t in 0..self.len() {
            let mode = self.modes[t];
            let w = &system
                .subsystems
                .get(mode)
                .ok_or_else(|| SarxError::Sizing(format!("mode {mode} out of range at step {t}")))?
                .0;
            y.push(predict(system.orders, w, &y, &self.u, t) + self.noise[t]);
        }
        Ok(y)
    }

    pub fn regressor(&self, orders: SystemOrder, t: usize) -> nalgebra::DVector<f64> {
        super::regressor_at(orders, &self.y, &self.u, t)
    }

    /// CSV with header `t,u,y,mode,noise`; floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,u,y,mode,noise")?;
        for t in 0..self.len() {
            writeln!(
                out,
                "{t},{:.16e},{:.16e},{},{:.16e}",
                self.u[t], self.y[t], self.modes[t], self.noise[t]
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| SarxError::Parse("empty trajectory file".into()))??;
        if header.trim() != "t,u,y,mode,noise" {
            return Err(SarxError::Parse(format!(
                "unexpected trajectory header `{}`",
                header.trim()
            )));
        }
        let mut traj = Trajectory {
            u: vec![],
            y: vec![],
            modes: vec![],
            noise: vec![],
        };
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 5 {
                return Err(SarxError::Parse(format!(
                    "row {}: expected 5 fields, got {}",
                    row + 1,
                    fields.len()
                )));
            }
            let bad = |what: &str| SarxError::Parse(format!("row {}: bad {what}", row + 1));
            let t: usize = fields[0].parse().map_err(|_| bad("t"))?;
            if t != traj.y.len() {
                return Err(SarxError::Parse(format!(
                    "row {}: expected t = {}, got {t}",
                    row + 1,
                    traj.y.len()
                )));
            }
            traj.u.push(fields[1].parse().map_err(|_| bad("u"))?);
            traj.y.push(fields[2].parse().map_err(|_| bad("y"))?);
            traj.modes.push(fields[3].parse().map_err(|_| bad("mode"))?);
            traj.noise
                .push(fields[4].parse().map_err(|_| bad("noise"))?);
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SubsystemParams, SystemOrder};

    fn one_step_system() -> SarxSystem {
        SarxSystem::new(
            SystemOrder::new(1, 1).unwrap(),
            vec![SubsystemParams(vec![0.5, 1.0])],
        )
        .unwrap()
    }

    #[test]
    fn hand_rolled_one_step_recursion() {
        // y_1 = 0.5 y_0 + 1 u_0, with y_0 = 0 (zero regressor, no noise) and u_0 = 1
        let sys = one_step_system();
        let traj = Trajectory {
            u: vec![1.0, 0.0],
            y: vec![0.0, 0.0],
            modes: vec![0, 0],
            noise: vec![0.0, 0.0],
        };
        let y = traj.replay(&sys).unwrap();
        assert_eq!(y, vec![0.0, 1.0]);
    }

    #[test]
    fn zero_input_zero_noise_gives_zero_output() {
        let sys = one_step_system();
        let traj = simulate(&sys, &SwitchingPattern::Fast, &NoiseModel::None, 0.0, 50, 4).unwrap();
        assert!(traj.y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unstable_system_aborts_with_step() {
        let sys = SarxSystem::new(
            SystemOrder::new(1, 1).unwrap(),
            vec![SubsystemParams(vec![3.0, 1.0])],
        )
        .unwrap();
        let err = simulate(
            &sys,
            &SwitchingPattern::Fast,
            &NoiseModel::None,
            1.0,
            1000,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, SarxError::Instability { step, .. } if step > 10));
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let sys = one_step_system();
        let noise = NoiseModel::TruncatedGaussian {
            std: 0.1,
            bound: 0.3,
        };
        let traj = simulate(&sys, &SwitchingPattern::Fast, &noise, 1.0, 64, 2).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let back = Trajectory::read_csv(&buf[..]).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn csv_rejects_bad_header() {
        let data = b"t,u,y\n0,1,2\n";
        assert!(Trajectory::read_csv(&data[..]).is_err());
    }
}
