//! Seeded, splittable random streams.
//!
//! A stream is a `(seed, stream)` pair mapped onto a ChaCha8 keystream: the
//! seed picks the key and the stream index picks the ChaCha nonce, so every
//! pair names an independent, reproducible sequence. Child streams are
//! derived by hashing the parent index with a tag, which lets estimators
//! hand one stream to each chunk or trial without any shared state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    /// Independent child stream identified by `tag`.
    pub fn child(&self, tag: u64) -> Self {
        Self {
            seed: self.seed,
            stream: mix64(self.stream ^ mix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d))),
        }
    }

    /// Child stream keyed by a label, for readable call sites.
    pub fn named(&self, label: &str) -> Self {
        // FNV-1a
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        self.child(h)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}
