//! Deterministic randomness: a SplitMix64 generator, Gaussian sampling via
//! Box–Muller, and labeled sub-seed derivation.
//!
//! The generator is deliberately a small, documented, stable algorithm
//! (SplitMix64, Steele et al.'s `splitmix64` finalizer) rather than a
//! platform RNG: runs with one seed must agree bitwise across machines and
//! releases, and cross-language reimplementations can match the stream from
//! the constants alone.

/// SplitMix64: 64 bits of state advanced by the golden-ratio increment and
/// scrambled by a two-round xor-multiply finalizer.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
    /// Cached second Box–Muller variate, served by the next Gaussian draw.
    spare_gaussian: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed, spare_gaussian: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in the open interval (0, 1): top 53 bits, shifted off zero so
    /// the Box–Muller logarithm never sees 0.
    pub fn next_f64(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n). `n` must be nonzero.
    ///
    /// Uses rejection from the top to avoid modulo bias.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Standard normal variate (Box–Muller, trigonometric form), one cached
    /// spare per pair so consecutive draws consume uniforms in a fixed
    /// pattern.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_gaussian = Some(r * theta.sin());
        r * theta.cos()
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }

    /// `k` distinct indices sampled uniformly from [0, n), in ascending
    /// order, via a partial Fisher–Yates over the index vector.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let k = k.min(n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.next_below((n - i) as u64) as usize;
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx.sort_unstable();
        idx
    }

    /// Derive an independent stream seed for a named pipeline stage.
    ///
    /// `sub_seed(seed, label)` hashes the label with FNV-1a, folds the master
    /// seed in by XOR, and scrambles once with the SplitMix64 finalizer so that
    /// related labels ("noise-x", "noise-y") give unrelated streams.
    pub fn sub_seed(seed: u64, label: &str) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in label.as_bytes() {
            h ^= u64::from(*byte);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        let mut z = seed ^ h;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}
