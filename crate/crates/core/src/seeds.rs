//! Named sub-streams derived from a single user seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// First 8 bytes of sha256(seed || name), little endian.
pub fn substream_seed(seed: u64, name: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

pub fn rng(seed: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, name))
}
