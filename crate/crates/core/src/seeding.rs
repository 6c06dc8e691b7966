//! Deterministic seed derivation and random streams.
//!
//! Child seeds are SplitMix64 finalizer hashes of a parent seed and a list of
//! labels. Adding a new label (a new K value, a new trial) never changes the
//! seeds already derived for other labels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `labels` into `base` one at a time: `h ← mix64(h + γ·(label + 1))`,
/// starting from `h = mix64(base)`.
pub fn derive_seed(base: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(mix64(base), |h, &label| mix64(h.wrapping_add(GOLDEN_GAMMA.wrapping_mul(label.wrapping_add(1)))))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `len` i.i.d. draws from `N(0, scale²)`.
pub fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let v: f64 = StandardNormal.sample(rng);
            scale * v
        })
        .collect()
}
