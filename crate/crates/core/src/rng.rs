//! Seeded random streams.
//!
//! Every stochastic component takes an explicit seed. Independent streams for
//! one run are derived from the run seed and a stream label so that, e.g.,
//! turning gradient noise off does not shift the shuffling sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Labels for the independent streams used inside one pipeline evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Init,
    Shuffle,
    Noise,
    Split,
    Synthetic,
    Search,
    Acquisition,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Init => 0x1,
            Stream::Shuffle => 0x2,
            Stream::Noise => 0x3,
            Stream::Split => 0x4,
            Stream::Synthetic => 0x5,
            Stream::Search => 0x6,
            Stream::Acquisition => 0x7,
        }
    }
}

/// splitmix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and an index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix(mix(seed) ^ index.wrapping_mul(0xA24B_AED4_963E_E407))
}

pub fn stream(seed: u64, stream: Stream) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, stream.tag()))
}

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
