use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random source keyed by a 64-bit seed and a stream index.
///
/// Backed by ChaCha8, whose output is fixed across platforms. Distinct
/// stream indices under the same seed give independent sequences, so each
/// stage of a session (or each trial) can own its stream without draws in
/// one stream shifting another.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl SeededGenerator {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeededGenerator { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random::<bool>()
    }

    /// Uniform index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Sample an index from a discrete distribution. Weights need not sum
    /// exactly to one; the last positive weight absorbs rounding.
    pub fn sample_weighted(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let target = self.uniform() * total;
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            last_positive = i;
            acc += w;
            if target < acc {
                return i;
            }
        }
        last_positive
    }
}

impl RngCore for SeededGenerator {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
