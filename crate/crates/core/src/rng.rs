//! Seeded random streams.
//!
//! Every random consumer in the crate draws from [`ChaCha8Rng`]. A job is
//! identified by a 64-bit seed; independent sub-jobs (AIS runs, the shuffles
//! used to pair sample sets) use the same seed on distinct ChaCha stream ids,
//! so results do not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream used by a single chain or a single simulation.
pub fn stream(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream `index` of the family rooted at `seed`.
pub fn substream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index + 1);
    rng
}
