//! Seeded randomness shared by every stochastic operation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type GenRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Splits off an independent stream, so that decisions drawn from the child
/// do not shift the parent's sequence by a data-dependent amount.
pub fn fork(rng: &mut GenRng) -> GenRng {
    ChaCha8Rng::seed_from_u64(rng.gen())
}

/// Lower edge of the probabilistic firing band.
pub const BAND_LOW: f64 = 0.3;
/// Upper edge of the band; values strictly above it always fire.
pub const BAND_HIGH: f64 = 0.5;

/// Probability that a stylistic decision with parameter value `p` fires.
///
/// Above 0.5 the decision is certain. Inside `[0.3, 0.5]` it fires with
/// probability `(p - 0.3) / 2`, i.e. at most 10% at the neutral value.
/// Below 0.3 it never fires.
pub fn firing_probability(p: f64) -> f64 {
    if p > BAND_HIGH {
        1.0
    } else if p >= BAND_LOW {
        (p - BAND_LOW) / 2.0
    } else {
        0.0
    }
}

/// Draws one value from `rng` and decides whether `p` fires.
///
/// Always consumes exactly one draw so streams stay aligned.
pub fn fires(p: f64, rng: &mut GenRng) -> bool {
    let u: f64 = rng.gen();
    u < firing_probability(p)
}
