//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8, a counter-based
//! generator. A stream is identified by `(seed, domain, index)`: the seed and
//! domain tag select the 256-bit key, the index selects the ChaCha stream
//! (nonce). Streams with different indices never overlap, so work split by
//! index (points, trials, replicas) produces the same numbers regardless of
//! how it is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags keep unrelated consumers of the same user seed apart.
pub mod domain {
    pub const POINTS: u64 = 0x504f_494e_5453;
    pub const KMEANS: u64 = 0x4b4d_4541_4e53;
    pub const TRIPLES: u64 = 0x5452_4950_4c45;
    pub const TOUCHED_LABELS: u64 = 0x544f_5543_4845;
    pub const EIGEN_INIT: u64 = 0x4549_4745_4e49;
    pub const MONTE_CARLO: u64 = 0x4d4f_4e54_4543;
    pub const SWEEP: u64 = 0x5357_4545_5053;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a path of integers into a new 64-bit seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stream `index` of the generator keyed by `(seed, domain)`.
pub fn stream(seed: u64, domain: u64, index: u64) -> StreamRng {
    let mut key = [0u8; 32];
    let mut state = derive_seed(seed, &[domain]);
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
