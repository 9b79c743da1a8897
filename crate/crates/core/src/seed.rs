//! Named random sub-streams derived from one base seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent sub-streams. Each component draws from its own stream so that
/// e.g. changing the initialization does not perturb the simulated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Simulation,
    Switching,
    System,
    Init,
    ColumnSampling,
    MonteCarlo,
    Realization(u64),
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Simulation => 0x51,
            Stream::Switching => 0x52,
            Stream::System => 0x53,
            Stream::Init => 0x54,
            Stream::ColumnSampling => 0x55,
            Stream::MonteCarlo => 0x56,
            Stream::Realization(k) => 0x1000_0000 ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child seed for `stream` under `base`.
pub fn derive_seed(base: u64, stream: Stream) -> u64 {
    splitmix64(splitmix64(base) ^ stream.tag())
}

pub fn stream_rng(base: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream))
}
