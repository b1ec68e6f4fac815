//! Seeded, explicitly derivable random streams.
//!
//! Every sampler in this crate is a pure function of (config, seed). Parallel
//! work derives one independent substream per cell from the pair
//! (seed, stream id), so merged results do not depend on scheduling order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The concrete generator used throughout the crate.
pub type Stream = ChaCha8Rng;

/// Derive the independent substream `stream` of the generator family `seed`.
///
/// Substreams with distinct ids never overlap: they share a ChaCha key and
/// differ in the 64-bit stream nonce.
pub fn substream(seed: u64, stream: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The root stream for a seed (substream 0).
pub fn root(seed: u64) -> Stream {
    substream(seed, 0)
}
