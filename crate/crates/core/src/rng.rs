//! Self-contained 64-bit mixing generator so that seeded runs are
//! bit-identical across platforms and ports.
//!
//! This is the splitmix64 sequence: the state advances by the golden-ratio
//! increment and each output is finalized with two xor-shift multiplies.
//! Bounded draws use rejection sampling, so they are unbiased and depend only
//! on the seed and the call sequence.

/// Deterministic 64-bit generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Next raw 64-bit value.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Reject the tail that would bias the modulo.
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Uniform index in `[0, bound)`.
    pub fn index(&mut self, bound: usize) -> usize {
        self.below(bound as u64) as usize
    }

    /// Chooses `count` distinct indices from `[0, pool)` by a partial
    /// Fisher-Yates shuffle.
    pub fn distinct_indices(&mut self, pool: usize, count: usize) -> Vec<usize> {
        debug_assert!(count <= pool);
        let mut indices: Vec<usize> = (0..pool).collect();
        for i in 0..count {
            let j = i + self.index(pool - i);
            indices.swap(i, j);
        }
        indices.truncate(count);
        indices
    }
}
