//! Counter-based splitmix64 generator with pure substream derivation.
//!
//! Every consumer of randomness (parameter init, batch shuffling, smoothing
//! noise, attack starts) draws from its own substream, so dropping one
//! training row can only affect the draws that depend on the row count.

use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Substream used for parameter initialization.
pub const STREAM_INIT: u64 = 1;
/// Substream used for per-epoch batch shuffles.
pub const STREAM_SHUFFLE: u64 = 2;
/// Substream used for smoothing and privacy noise.
pub const STREAM_NOISE: u64 = 3;
/// Substream used by adversarial attack starts.
pub const STREAM_ATTACK: u64 = 4;
/// Substream used for dataset splits.
pub const STREAM_SPLIT: u64 = 5;
/// Substream used by synthetic data generators.
pub const STREAM_SYNTHETIC: u64 = 6;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rng {
    state: u64,
    stream_id: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self::derive(seed, 0)
    }

    /// Starts the substream `stream_id` of `seed`. Pure: no shared state.
    pub fn derive(seed: u64, stream_id: u64) -> Self {
        let salt = mix64(stream_id.wrapping_mul(GOLDEN_GAMMA) ^ 0x5851_F42D_4C95_7F2D);
        Rng {
            state: mix64(seed ^ salt).wrapping_add(salt.rotate_left(17)),
            stream_id,
        }
    }

    /// Derives a substream from a path of keys, e.g. `[stream, trial]`.
    pub fn derive_path(seed: u64, path: &[u64]) -> Self {
        let mut key = seed;
        let mut last = 0;
        for &p in path {
            key = Rng::derive(key, p).next_u64();
            last = p;
        }
        let mut rng = Rng::derive(key, last);
        rng.stream_id = last;
        rng
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in the open interval `(0, 1)`.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal draw (Box-Muller, one value per two uniforms).
    pub fn normal(&mut self) -> f64 {
        let u1 = self.next_open01();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Laplace draw with location 0 and the given scale.
    pub fn laplace(&mut self, scale: f64) -> f64 {
        let u = self.next_open01() - 0.5;
        -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// A random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        self.shuffle(&mut idx);
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = Rng::derive(42, STREAM_INIT);
        let mut b = Rng::derive(42, STREAM_INIT);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = Rng::derive(42, STREAM_INIT);
        let mut b = Rng::derive(42, STREAM_SHUFFLE);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniform_ranges() {
        let mut r = Rng::new(3);
        for _ in 0..10_000 {
            let x = r.next_f64();
            assert!((0.0..1.0).contains(&x));
            let y = r.next_open01();
            assert!(y > 0.0 && y < 1.0);
            assert!(r.below(7) < 7);
        }
    }

    #[test]
    fn moments_are_plausible() {
        let mut r = Rng::new(11);
        let n = 200_000;
        let (mut s, mut s2, mut l1) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let z = r.normal();
            s += z;
            s2 += z * z;
            l1 += r.laplace(2.0).abs();
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
        // E|Laplace(b)| = b
        assert!((l1 / n as f64 - 2.0).abs() < 0.03);
    }

    #[test]
    fn permutation_is_a_permutation() {
        let mut r = Rng::new(5);
        let mut p = r.permutation(100);
        p.sort_unstable();
        assert_eq!(p, (0..100).collect::<Vec<_>>());
    }
}
