//! Per-sample random streams.
//!
//! Sample `i` of a run with master seed `s` draws its Gaussian/Poisson/Gamma
//! variates from ChaCha8 stream `2i` keyed by `s`, and its fair coins from
//! stream `2i + 1`. Streams are counter based, so any subset of samples can
//! be regenerated independently and in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pinned in every output manifest; bump when the stream layout changes.
pub const RNG_VERSION: &str = "chacha8-stream-pair/1";

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn noise_stream(seed: u64, index: u64) -> ChaCha8Rng {
    stream(seed, 2 * index)
}

pub fn coin_stream(seed: u64, index: u64) -> ChaCha8Rng {
    stream(seed, 2 * index + 1)
}

/// SplitMix64 finaliser, used to derive independent master seeds for
/// sub-runs (e.g. one per nested sequence).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
