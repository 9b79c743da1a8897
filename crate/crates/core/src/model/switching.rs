use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SarxError};
use crate::seed::{stream_rng, Stream};

/// How the active subsystem evolves over time. Modes are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SwitchingPattern {
    /// Blocks of `block_length` steps, visiting subsystems 0, 1, …, m-1, 0, …
    Slow {
        block_length: usize,
    },
    /// Segments of `dwell + G` steps with `G ~ Geometric(geo_p)` on {0, 1, …};
    /// each segment's mode is uniform over all `m` subsystems.
    MinDwell {
        dwell: usize,
        geo_p: f64,
    },
    /// Every step drawn i.i.d. uniform.
    Fast,
    Explicit {
        sequence: Vec<usize>,
    },
}

impl SwitchingPattern {
    pub fn tag(&self) -> &'static str {
        match self {
            SwitchingPattern::Slow { .. } => "SS",
            SwitchingPattern::MinDwell { .. } => "MD",
            SwitchingPattern::Fast => "FS",
            SwitchingPattern::Explicit { .. } => "EX",
        }
    }
}

/// Generates a length-`horizon` mode sequence over `0..m`, deterministic in
/// `seed`.
pub fn generate_switching(
    pattern: &SwitchingPattern,
    m: usize,
    horizon: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(SarxError::InvalidConfig("switching needs m >= 1".into()));
    }
    let mut rng = stream_rng(seed, Stream::Switching);
    match pattern {
        SwitchingPattern::Slow { block_length } => {
            if *block_length == 0 {
                return Err(SarxError::InvalidConfig(
                    "slow switching block_length must be positive".into(),
                ));
            }
            Ok((0..horizon).map(|t| (t / block_length) % m).collect())
        }
        SwitchingPattern::MinDwell { dwell, geo_p } => {
            if *dwell == 0 {
                return Err(SarxError::InvalidConfig(
                    "min-dwell switching needs dwell >= 1".into(),
                ));
            }
            let geo = Geometric::new(*geo_p).map_err(|_| {
                SarxError::InvalidConfig(format!("geometric parameter {geo_p} not in (0, 1]"))
            })?;
            let mut modes = Vec::with_capacity(horizon);
            while modes.len() < horizon {
                let mode = rng.random_range(0..m);
                let extra = geo.sample(&mut rng) as usize;
                let len = dwell.saturating_add(extra);
                let take = len.min(horizon - modes.len());
                modes.extend(std::iter::repeat_n(mode, take));
            }
            Ok(modes)
        }
        SwitchingPattern::Fast => Ok((0..horizon).map(|_| rng.random_range(0..m)).collect()),
        SwitchingPattern::Explicit { sequence } => {
            if sequence.len() != horizon {
                return Err(SarxError::Sizing(format!(
                    "explicit switching sequence has {} entries, horizon is {horizon}",
                    sequence.len()
                )));
            }
            if let Some((t, &bad)) = sequence.iter().enumerate().find(|(_, &s)| s >= m) {
                return Err(SarxError::InvalidConfig(format!(
                    "explicit switching sequence has mode {bad} at step {t}, but m = {m}"
                )));
            }
            Ok(sequence.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slow_switching_blocks() {
        let s =
            generate_switching(&SwitchingPattern::Slow { block_length: 500 }, 4, 2000, 1).unwrap();
        assert!(s[..500].iter().all(|&x| x == 0));
        assert!(s[500..1000].iter().all(|&x| x == 1));
        assert!(s[1000..1500].iter().all(|&x| x == 2));
        assert!(s[1500..].iter().all(|&x| x == 3));
    }

    #[test]
    fn fast_single_mode() {
        let s = generate_switching(&SwitchingPattern::Fast, 1, 10, 3).unwrap();
        assert_eq!(s, vec![0; 10]);
    }

    #[test]
    fn min_dwell_degenerate_geometric() {
        let p = SwitchingPattern::MinDwell {
            dwell: 30,
            geo_p: 1.0,
        };
        let s = generate_switching(&p, 3, 3000, 5).unwrap();
        // segments are exactly 30 long, though adjacent ones may share a mode
        for chunk in s.chunks(30) {
            assert!(chunk.iter().all(|&x| x == chunk[0]));
        }
    }

    #[test]
    fn min_dwell_segments_respect_dwell() {
        let p = SwitchingPattern::MinDwell {
            dwell: 30,
            geo_p: 1.0 / 16.0,
        };
        for seed in 0..20 {
            let s = generate_switching(&p, 4, 2000, seed).unwrap();
            let mut runs = Vec::new();
            let mut start = 0;
            for t in 1..=s.len() {
                if t == s.len() || s[t] != s[start] {
                    runs.push(t - start);
                    start = t;
                }
            }
            let last = runs.len() - 1;
            assert!(runs[..last].iter().all(|&r| r >= 30), "{runs:?}");
        }
    }

    #[test]
    fn explicit_out_of_range() {
        let p = SwitchingPattern::Explicit {
            sequence: vec![0, 1, 2],
        };
        assert!(matches!(
            generate_switching(&p, 2, 3, 0),
            Err(SarxError::InvalidConfig(_))
        ));
        assert_eq!(generate_switching(&p, 3, 3, 0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn deterministic_in_seed() {
        let a = generate_switching(&SwitchingPattern::Fast, 4, 100, 9).unwrap();
        let b = generate_switching(&SwitchingPattern::Fast, 4, 100, 9).unwrap();
        let c = generate_switching(&SwitchingPattern::Fast, 4, 100, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
