// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seed derivation for reproducible, parallel-safe random streams.
//!
//! Every consumer of randomness asks for a stream keyed by a tuple of
//! integers. Streams are ChaCha8 instances whose key is a SplitMix64 mix of
//! the master seed and the tuple; the ChaCha stream id carries the innermost
//! index (e.g. the bootstrap replicate). Results therefore do not depend on
//! scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of integer keys into a child seed.
pub fn derive_seed(master: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(master), |acc, k| splitmix64(acc ^ splitmix64(*k)))
}

/// Counter-based substream `stream` of the generator keyed by `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// Domain tags so that different consumers never share a stream.
pub(crate) const TAG_BOOTSTRAP: u64 = 0x626f_6f74;
pub(crate) const TAG_MEDIAN: u64 = 0x6d65_6469;
