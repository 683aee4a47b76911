//! Seeded random streams.
//!
//! Every random quantity derives from one root seed. Independent tasks
//! (chains, replicates, annealing attempts) get their own ChaCha8 stream
//! selected by a task id, so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ErgmRng = ChaCha8Rng;

/// Generator for `(seed, stream)`; ChaCha output is identical on every platform.
pub fn stream_rng(seed: u64, stream: u64) -> ErgmRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a child index into a seed (splitmix64 finalizer).
pub fn derive_seed(seed: u64, child: u64) -> u64 {
    let mut z = seed ^ child.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
