//! Counter-based random substreams.
//!
//! Every random task draws from a ChaCha8 stream keyed by `(seed, task)`, so the
//! output of a run does not depend on thread scheduling or task order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn substream(seed: u64, task: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Derives a child seed, used when a task itself needs further substreams.
pub fn child_seed(seed: u64, task: u64) -> u64 {
    use rand::RngCore;
    substream(seed, task).next_u64()
}
