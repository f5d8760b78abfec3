//! Seeded, splittable randomness for the randomized drivers.
//!
//! Trial `n` of a run with seed `s` always draws from ChaCha8 stream `n` of
//! key `s`, so results do not depend on how trials are spread over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
