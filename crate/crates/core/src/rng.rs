//! Deterministic random streams.
//!
//! Every random draw in the crate goes through an explicitly passed
//! [`Stream`]. Dataset generation derives one stream per `(M, N, draw)` slot
//! from the master seed, so the bytes written never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// A stream seeded directly from a 64-bit seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for one generation slot.
///
/// The ChaCha stream id packs `(m, n, draw)` injectively: 8 bits each for the
/// cell coordinates and 48 bits for the draw counter.
pub fn cell_stream(master_seed: u64, m: usize, n: usize, draw: u64) -> Stream {
    debug_assert!(m < 256 && n < 256 && draw < (1 << 48));
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((m as u64) << 56) | ((n as u64) << 48) | (draw & ((1 << 48) - 1)));
    rng
}
