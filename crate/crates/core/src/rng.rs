// SPDX-License-Identifier: Apache-2.0

//! Seeded random streams. Every stochastic choice draws from a stream keyed by
//! `(seed, domain, index)`, so results do not depend on evaluation order or
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Split = 1,
    Init = 2,
    Offspring = 3,
    Sampling = 4,
}

const INDEX_BITS: u32 = 60;

pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << INDEX_BITS) | (index & ((1 << INDEX_BITS) - 1)));
    rng
}

/// Stream for pair `slot` of generation `generation`.
pub fn offspring_stream(seed: u64, generation: u64, slot: u64) -> ChaCha8Rng {
    stream(
        seed,
        Domain::Offspring,
        (generation << 24) | (slot & 0xff_ffff),
    )
}
