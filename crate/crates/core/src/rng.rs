//! Seed derivation for reproducible, schedule-independent Monte Carlo.
//!
//! Every parallelizable unit of work (a trial, a repetition) gets its own
//! ChaCha8 stream whose seed is derived from the master seed plus integer
//! tags, so results never depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One step of the splitmix64 sequence. Standard constants.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with integer tags into one derived seed.
///
/// Each tag is absorbed by xoring it into the running state and advancing
/// splitmix64, so (seed, [a, b]) and (seed, [b, a]) yield different streams.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = master;
    let mut out = splitmix64(&mut state);
    for &tag in tags {
        state ^= tag;
        out = splitmix64(&mut state);
    }
    out
}

/// Independent ChaCha8 stream for the given master seed and tags.
pub fn stream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tags))
}
