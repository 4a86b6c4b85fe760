//! Seed derivation for the independent random streams of a run.
//!
//! Every stream is a `ChaCha8Rng` seeded from a 64-bit value obtained by
//! mixing the run seed, a stream tag and up to two counters with the
//! SplitMix64 finalizer. Streams never share state, so the order in which
//! they are consumed cannot change a run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 0x1,
    Perturbation = 0x2,
    Plan = 0x3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, stream: Stream, a: u64, b: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ stream as u64);
    h = splitmix64(h ^ a);
    splitmix64(h ^ b)
}

pub fn stream_rng(seed: u64, stream: Stream, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream, a, b))
}
