//! Counter-based random streams.
//!
//! A [`StreamFactory`] maps `(master seed, domain, index)` to an independent
//! ChaCha8 stream: the key comes from the master seed and domain, the ChaCha
//! stream id is the index. Monte Carlo loops give path `i` stream `i`, so
//! results do not depend on thread count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Random stream handed to samplers.
pub type Stream = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamFactory {
    master_seed: u64,
    domain: u64,
}

impl StreamFactory {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            domain: 0,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Child factory for a named experiment or sub-purpose. Children with
    /// different labels never share streams.
    pub fn derive(&self, label: &str) -> Self {
        Self {
            master_seed: self.master_seed,
            domain: splitmix64(self.domain ^ fnv1a(label)),
        }
    }

    /// Stream number `index` within this factory's domain.
    pub fn stream(&self, index: u64) -> Stream {
        let key = splitmix64(self.master_seed ^ splitmix64(self.domain));
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        rng.set_stream(index);
        rng
    }

    /// Runs `f(stream_i, i)` for `i in 0..n` in parallel, returning results
    /// in index order.
    pub fn par_map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut Stream, usize) -> T + Sync + Send,
    {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = self.stream(i as u64);
                f(&mut rng, i)
            })
            .collect()
    }
}
