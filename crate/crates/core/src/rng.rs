//! Seeding for reproducible, order-independent sampling.
//!
//! A [`SeedSpec`] names one stream. Child streams are derived by mixing a
//! counter into the stream index, so trial `t` always sees the same random
//! numbers no matter which worker thread evaluates it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            stream_index: 0,
        }
    }

    pub fn with_stream(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Derive the `i`-th child stream. Distinct `(stream_index, i)` pairs
    /// map to distinct children with overwhelming probability.
    pub fn child(&self, i: u64) -> Self {
        let mixed = splitmix64(self.stream_index ^ splitmix64(i.wrapping_add(0xA076_1D64_78BD_642F)));
        Self {
            master_seed: self.master_seed,
            stream_index: mixed,
        }
    }

    /// The generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

impl Default for SeedSpec {
    fn default() -> Self {
        Self::new(0)
    }
}
