//! Seeded random streams.
//!
//! Every stream is a ChaCha8 keystream (`rand_chacha`) seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. Unit draws take the top 53 bits of
//! `next_u64` scaled by 2^-53, giving values in `[0, 1)`. Index draws are
//! `floor(unit * n)`. Sub-streams reuse the seed and select ChaCha stream
//! `id + 1`, so they never overlap the parent stream (stream 0) and do not
//! depend on how much of the parent has been consumed.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Source of uniform draws. Implemented by [`RngStream`] and by
/// [`FixedDraws`] for stubbing exact values in tests.
pub trait Draw {
    /// Uniform draw in `[0, 1)`.
    fn unit(&mut self) -> f64;

    /// Uniform index in `0..n`. `n` must be positive.
    fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.unit() * n as f64) as usize).min(n - 1)
    }

    /// Uniform draw in `[lo, hi)`.
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent sub-stream `id` (per particle, per ant, per restart).
    pub fn substream(&self, id: u64) -> RngStream {
        Self::with_stream(self.seed, id.wrapping_add(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Fisher-Yates shuffle driven by [`Draw::index`].
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    /// ChaCha stream selector (0 for a root stream, `id + 1` for sub-stream `id`).
    pub fn stream_id(&self) -> u64 {
        self.stream
    }
}

impl Draw for RngStream {
    #[inline]
    fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Replays a fixed list of unit draws, cycling when exhausted.
#[derive(Debug, Clone)]
pub struct FixedDraws {
    values: Vec<f64>,
    pos: usize,
}

impl FixedDraws {
    pub fn new(values: impl Into<Vec<f64>>) -> Self {
        let values = values.into();
        assert!(!values.is_empty(), "FixedDraws needs at least one value");
        Self { values, pos: 0 }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(vec![value])
    }
}

impl Draw for FixedDraws {
    fn unit(&mut self) -> f64 {
        let v = self.values[self.pos % self.values.len()];
        self.pos += 1;
        v
    }
}
