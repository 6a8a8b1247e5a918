//! Seeded, derivable random streams.
//!
//! Every random decision in this crate is drawn from a [`RandomSource`]
//! addressed by a base seed plus a derivation path of 64-bit labels
//! (for corpus work: epoch, line index, token index). Identical
//! `(seed, path)` pairs always yield identical draw sequences, so output
//! never depends on processing order and whole-corpus runs are
//! reproducible byte for byte.
//!
//! The derivation key is computed by folding the path labels into the
//! base seed with the SplitMix64 finalizer:
//!
//! ```text
//! mix64(x): x ^= x >> 30; x *= 0xbf58476d1ce4e5b9;
//!           x ^= x >> 27; x *= 0x94d049bb133111eb;
//!           x ^= x >> 31; return x
//!
//! key = mix64(seed ^ GOLDEN)
//! for each label: key = mix64(key + GOLDEN ^ mix64(label))
//! ```
//!
//! (all arithmetic wrapping, `GOLDEN = 0x9e3779b97f4a7c15`). The key then
//! seeds a ChaCha8 stream. Draws are stable across builds of this crate;
//! bit-equality with other implementations is not a goal.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer. Full-avalanche 64-bit mixing.
#[inline]
fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

/// Fold a derivation path into a base seed. Order-sensitive: the paths
/// `[a, b]` and `[b, a]` produce unrelated keys.
fn derive_key(seed: u64, path: &[u64]) -> u64 {
    let mut key = mix64(seed ^ GOLDEN);
    for &label in path {
        key = mix64(key.wrapping_add(GOLDEN) ^ mix64(label));
    }
    key
}

/// A deterministic random stream identified by `(seed, derivation path)`.
#[derive(Debug, Clone)]
pub struct RandomSource {
    key: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    /// Stream for a bare seed (empty derivation path).
    pub fn new(seed: u64) -> Self {
        Self::derive(seed, &[])
    }

    /// Stream for `seed` narrowed by `path`. Any change to the seed or
    /// to any label yields an independent stream.
    pub fn derive(seed: u64, path: &[u64]) -> Self {
        let key = derive_key(seed, path);
        // Expand the 64-bit key into the 256-bit ChaCha seed by
        // iterating the same mixer.
        let mut seed_bytes = [0u8; 32];
        let mut word = key;
        for chunk in seed_bytes.chunks_exact_mut(8) {
            word = mix64(word.wrapping_add(GOLDEN));
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        Self {
            key,
            rng: ChaCha8Rng::from_seed(seed_bytes),
        }
    }

    /// The derived 64-bit stream key (diagnostic; identifies the stream).
    pub fn key(&self) -> u64 {
        self.key
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
