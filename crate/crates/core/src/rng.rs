//! Seed-derived random streams.
//!
//! Every draw in a run comes from a ChaCha stream keyed by
//! `(seed, purpose, iteration, player)`, so schedule randomness and
//! strategy sampling stay reproducible independently of each other.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Schedule = 1,
    Play = 2,
    Announce = 3,
    Setup = 4,
    Sampling = 5,
    Tables = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, stream: Stream, t: u64, player: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ stream as u64);
    h = splitmix64(h ^ t);
    splitmix64(h ^ player)
}

pub fn stream(seed: u64, stream: Stream, t: u64, player: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream, t, player))
}
