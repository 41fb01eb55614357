//! Seeding rules for reproducible Monte-Carlo runs.
//!
//! Every stochastic routine takes an explicit `u64` seed. Replication `r` of a
//! run seeded with `s` draws from ChaCha8 keyed by `s` on stream `r`, so
//! replications are independent of each other and of evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for replication `replication` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, replication: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}
