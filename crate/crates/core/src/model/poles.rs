use rand::Rng;

use super::{SarxSystem, SubsystemParams, SystemOrder};
use crate::error::Result;
use crate::seed::{stream_rng, Stream};

/// Maps two real poles of `z² - a1 z - a2` to `(a1, a2)`.
pub fn coefficients_from_poles(p1: f64, p2: f64) -> (f64, f64) {
    (p1 + p2, -p1 * p2)
}

/// Roots of `z² - a1 z - a2`, larger real part first. Complex pairs come back
/// as `None`.
pub fn poles_from_coefficients(a1: f64, a2: f64) -> Option<(f64, f64)> {
    let disc = a1 * a1 + 4.0 * a2;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some(((a1 + s) / 2.0, (a1 - s) / 2.0))
}

/// `m` second-order subsystems (`na = 2, nc = 1`) whose two real poles are
/// drawn uniformly on [-1, 1]; the input gain is fixed at `c1`.
pub fn random_system_from_poles(m: usize, c1: f64, seed: u64) -> Result<SarxSystem> {
    let mut rng = stream_rng(seed, Stream::System);
    let orders = SystemOrder::new(2, 1)?;
    let subsystems = (0..m)
        .map(|_| {
            let p1: f64 = rng.random_range(-1.0..=1.0);
            let p2: f64 = rng.random_range(-1.0..=1.0);
            let (a1, a2) = coefficients_from_poles(p1, p2);
            SubsystemParams(vec![a1, a2, c1])
        })
        .collect();
    SarxSystem::new(orders, subsystems)
}
