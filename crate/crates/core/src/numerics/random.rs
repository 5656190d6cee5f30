//! Counting statistics and reproducible random streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// One draw from `Poisson(mean)`. Non-positive means yield zero.
pub fn poisson_sample<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(dist) => dist.sample(rng) as u64,
        // only reachable for means beyond ~1.8e19
        Err(_) => mean.round() as u64,
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, point, repeat)`.
///
/// Every sample in a sweep gets its own stream, so results do not depend on
/// the order in which points are evaluated.
pub fn stream_rng(seed: u64, point: u64, repeat: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(splitmix64(seed) ^ point) ^ repeat.rotate_left(32));
    ChaCha8Rng::seed_from_u64(key)
}
