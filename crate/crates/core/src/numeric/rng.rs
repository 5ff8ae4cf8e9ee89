//! Seeded normal sampling for Monte Carlo cross-checks.
//!
//! Built on ChaCha20, a counter-based stream cipher RNG: every sampler owns
//! its own state, there is no global RNG, and a given seed reproduces the
//! identical stream on every platform and thread layout.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

/// A dedicated RNG stream for one simulation.
pub(crate) fn stream(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Draws one standard normal variate from `rng`.
#[inline]
pub(crate) fn draw_std_normal(rng: &mut ChaCha20Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Draws `n` values from N(`mean`, `sd`^2) under the given seed.
///
/// `sd` may be zero (a point mass). Panics if `mean` or `sd` is non-finite,
/// `sd` is negative, or `n` is zero.
pub fn mc_sample(mean: f64, sd: f64, n: usize, seed: u64) -> Vec<f64> {
    assert!(mean.is_finite(), "mc_sample: mean must be finite");
    assert!(
        sd.is_finite() && sd >= 0.0,
        "mc_sample: sd must be finite and non-negative, got {sd}"
    );
    assert!(n >= 1, "mc_sample: need at least one draw");
    let mut rng = stream(seed);
    (0..n).map(|_| mean + sd * draw_std_normal(&mut rng)).collect()
}
