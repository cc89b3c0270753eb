//! Fixed-algorithm random streams.
//!
//! Every stream is ChaCha8 seeded through `seed_from_u64`, so a seed maps to the
//! same draw sequence on every platform. Replicate streams are derived from a
//! master seed with a SplitMix64 mix of the cell coordinates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SuiteRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a path of coordinates.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &k| splitmix64(acc ^ splitmix64(k.wrapping_add(0x632b_e59b_d9b4_e019))))
}
