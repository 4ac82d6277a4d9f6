//! Seed derivation for reproducible runs.
//!
//! Every random choice in the crate is drawn from a ChaCha8 stream whose seed
//! is derived from one master seed, a stream name and an index. Parallel and
//! sequential execution therefore consume identical streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of sub-stream `(stream, indices...)` from `master`.
pub fn derive_seed(master: u64, stream: &str, indices: &[u64]) -> u64 {
    // FNV-1a over the stream name keeps distinct names apart.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in stream.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    let mut s = splitmix64(master ^ splitmix64(h));
    for &i in indices {
        s = splitmix64(s ^ splitmix64(i.wrapping_add(0x5851_F42D_4C95_7F2D)));
    }
    s
}
