use super::BoundComputation;
use crate::error::{Result, SarxError};

/// Largest window length for which the exact mode enumerates vertices.
pub const EXACT_MODE_CAP: usize = 24;

/// Running vector is recomputed from scratch this often to stop drift.
const RESYNC_MASK: u64 = (1 << 12) - 1;

/// `max ‖A v − b‖` over the vertices `v ∈ {±n_max}^{N_C}`.
///
/// Vertices `v` and `−v` are visited together (`‖A(−v) − b‖ = ‖A v + b‖`), so
/// only half the cube is walked, in Gray-code order: consecutive vertices
/// differ in one coordinate and `A v` is updated with a single column.
pub fn exact_upper_bound(bc: &BoundComputation, n_max: f64) -> Result<f64> {
    let (n, nc) = bc.a.shape();
    if nc > EXACT_MODE_CAP {
        return Err(SarxError::ExactModeTooLarge {
            window: nc,
            cap: EXACT_MODE_CAP,
        });
    }
    if !(n_max >= 0.0) {
        return Err(SarxError::InvalidConfig(format!(
            "n_max must be >= 0 (got {n_max})"
        )));
    }
    let b = bc.b.as_slice();
    if n_max == 0.0 || nc == 0 {
        return Ok(bc.b.norm());
    }
    let cols = bc.a.as_slice(); // column-major
    let col = |k: usize| &cols[k * n..(k + 1) * n];

    // last coordinate pinned at +n_max; the mirror vertex covers −n_max
    let free = nc - 1;
    let mut positive = vec![false; nc];
    positive[nc - 1] = true;
    let mut av = vec![0.0; n];
    let resync = |positive: &[bool], av: &mut [f64]| {
        av.iter_mut().for_each(|x| *x = 0.0);
        for (k, &p) in positive.iter().enumerate() {
            let s = if p { n_max } else { -n_max };
            for (x, a) in av.iter_mut().zip(col(k)) {
                *x += s * a;
            }
        }
    };
    resync(&positive, &mut av);

    let eval = |av: &[f64]| {
        let (mut minus, mut plus) = (0.0, 0.0);
        for (x, bi) in av.iter().zip(b) {
            minus += (x - bi) * (x - bi);
            plus += (x + bi) * (x + bi);
        }
        minus.max(plus)
    };

    let mut best = eval(&av);
    let count: u64 = 1u64 << free;
    for i in 1..count {
        let k = i.trailing_zeros() as usize;
        positive[k] = !positive[k];
        if i & RESYNC_MASK == 0 {
            resync(&positive, &mut av);
        } else {
            let step = if positive[k] {
                2.0 * n_max
            } else {
                -2.0 * n_max
            };
            for (x, a) in av.iter_mut().zip(col(k)) {
                *x += step * a;
            }
        }
        best = best.max(eval(&av));
    }
    Ok(best.sqrt())
}
