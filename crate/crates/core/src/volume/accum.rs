//! Streaming mean/variance with an order-fixed parallel merge.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::rng::RngStream;

/// Samples per chunk; chunk `k` draws from child stream `k`.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// Welford accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accum {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Accum {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&self, other: &Accum) -> Accum {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        Accum {
            count: self.count + other.count,
            mean: self.mean + d * nb / n,
            m2: self.m2 + other.m2 + d * d * na * nb / n,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

pub fn chunk_count(budget: u64) -> u64 {
    budget.div_ceil(CHUNK_SIZE)
}

/// Run `body(rng, len, acc)` over the fixed chunking of `budget` in parallel
/// and merge the chunk accumulators in chunk order, so the result does not
/// depend on the number of worker threads.
pub fn run_chunks<F>(budget: u64, stream: RngStream, body: F) -> Accum
where
    F: Fn(&mut ChaCha8Rng, u64, &mut Accum) + Sync,
{
    let parts: Vec<Accum> = (0..chunk_count(budget))
        .into_par_iter()
        .map(|k| {
            let len = CHUNK_SIZE.min(budget - k * CHUNK_SIZE);
            let mut rng = stream.child(k).rng();
            let mut acc = Accum::default();
            body(&mut rng, len, &mut acc);
            acc
        })
        .collect();
    parts.iter().fold(Accum::default(), |a, b| a.merge(b))
}
