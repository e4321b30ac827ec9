//! Deterministic counter-based RNG with independent substreams.
//!
//! Every draw is a pure function of `(seed, stream, counter)`, so parallel
//! workers that each own their own stream reproduce byte-identical results
//! regardless of scheduling. The generator is a SplitMix64-style finalizer
//! over an affine counter walk; the stream id selects the (odd) increment,
//! which is how SplitMix64's `split()` derives independent generators.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seedable counter-based generator. `Clone` gives an identical replay.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    key: u64,
    gamma: u64,
    counter: u64,
}

impl Rng {
    /// Generator for `(seed, stream)`. Same pair, same sequence, always.
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix64(seed ^ GOLDEN_GAMMA);
        // Per-stream increment must be odd for a full-period walk.
        let gamma = mix64(stream.wrapping_add(GOLDEN_GAMMA)) | 1;
        Rng {
            seed,
            key,
            gamma,
            counter: 0,
        }
    }

    /// Fresh generator on stream `stream` of the same seed, counter at zero.
    pub fn substream(&self, stream: u64) -> Self {
        Rng::new(self.seed, stream)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(self.gamma)))
    }

    /// Uniform in [0, 1) with full 53-bit mantissa.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Standard normal via Box-Muller. Consumes two uniforms per draw.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64().max(1e-300);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Uniform index in [0, n). Modulo bias is < 2^-44 for any n this
    /// crate ever uses (n << 2^20).
    #[inline]
    pub fn gen_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.gen_index(i + 1);
            items.swap(i, j);
        }
    }

    /// `k` distinct indices drawn uniformly from [0, n), in draw order.
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        debug_assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.gen_index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

/// Deterministically fold a salt into a seed, for per-fold / per-worker seeds.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    mix64(seed ^ mix64(salt.wrapping_add(GOLDEN_GAMMA)))
}
