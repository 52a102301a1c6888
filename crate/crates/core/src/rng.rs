//! Seeded random streams.
//!
//! A stream is fully determined by its seed and stream index, so results do
//! not depend on thread scheduling: parallel work takes an explicit
//! [`RngStream::substream`] per task.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::real::Real;

/// Deterministic ChaCha20 generator identified by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream number `index` derived from this stream's seed.
    /// The result does not depend on how much of `self` has been consumed.
    pub fn substream(&self, index: u64) -> Self {
        Self::with_stream(self.seed, splitmix64(self.stream ^ splitmix64(index.wrapping_add(1))))
    }

    /// Uniform draw on the open interval `(0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw on `(0, 1)` in the requested precision, never 0 or 1.
    pub fn uniform_real<T: Real>(&mut self) -> T {
        let u = T::lit(self.uniform());
        let one = T::one();
        if u >= one {
            one - T::epsilon() / T::lit(2.0)
        } else if u <= T::zero() {
            T::min_positive_value()
        } else {
            u
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Standard normal draw by inversion (one uniform per variate).
    pub fn standard_normal<T: Real>(&mut self) -> T {
        crate::special::norm_quantile_raw(self.uniform_real::<T>())
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
