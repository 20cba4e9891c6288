//! Seeded random streams.
//!
//! Every stochastic decision in the crate draws from an [`RngStream`]. The
//! generator is ChaCha with 8 rounds, seeded through `seed_from_u64`, which is
//! specified bit-for-bit and therefore reproducible across platforms.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Name of the generator behind every stream.
pub const ALGORITHM: &str = "chacha8";

/// A deterministic random source.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        ALGORITHM
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform draw in `[lo, hi)`; returns `lo` when the interval is empty.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        self.inner.random_range(0..n)
    }

    /// Gaussian draw.
    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        if std_dev <= 0.0 {
            return mean;
        }
        Normal::new(mean, std_dev)
            .expect("finite positive std_dev")
            .sample(&mut self.inner)
    }

    /// Random permutation of `0..n` (Fisher-Yates).
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i + 1);
            order.swap(i, j);
        }
        order
    }

    /// Splits off a family of per-node streams.
    ///
    /// One draw is taken from `self`; stream `i` of the family then depends
    /// only on that draw and `i`, so the order in which nodes consume their
    /// streams does not matter.
    pub fn split(&mut self) -> StreamFamily {
        StreamFamily {
            epoch: self.inner.next_u64(),
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Per-node sub-streams derived from one parent draw.
#[derive(Debug, Clone, Copy)]
pub struct StreamFamily {
    epoch: u64,
}

impl StreamFamily {
    pub fn stream(&self, index: usize) -> RngStream {
        RngStream::with_stream(self.epoch, index as u64)
    }
}
