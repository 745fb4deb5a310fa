//! Seeded random streams. Every randomized routine takes an explicit rng;
//! batch drivers derive one independent stream per task index so results do
//! not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type IqpRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> IqpRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream(seed: u64, stream: u64) -> IqpRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
