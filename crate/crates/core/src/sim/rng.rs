//! Role-labelled random streams.
//!
//! Every source of randomness in a run gets its own stream derived from the
//! master seed by a fixed label, so adding or removing one consumer never
//! perturbs another's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed stream labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    DataBits = 1,
    Noise = 2,
    Interleaver = 3,
}

/// Independent seeded stream for `(master_seed, role)`.
pub fn role_rng(master_seed: u64, role: StreamRole) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(
        master_seed.wrapping_add((role as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
    ))
}

/// Derives the interleaver seed for a master seed.
pub fn interleaver_seed(master_seed: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(3u64.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
