//! Seeded uniform streams.
//!
//! The contract is `(seed, replica, edge) -> U`: replica `r` reads ChaCha8
//! stream `r` of the generator keyed by `seed`, and edge `e` receives the
//! `e`-th 64-bit output of that stream mapped to `[0, 1)` with 53 bits of
//! precision. Because the mapping is fixed, any replica can be regenerated
//! on any thread in any order, and the same uniforms drive plain sampling,
//! shared-uniform sweeps and the exploration coupling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64, replica: u64) -> UniformStream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replica);
        UniformStream { rng }
    }

    /// Positions the stream so that the next draw is the uniform of `edge`.
    pub fn seek(&mut self, edge: usize) {
        self.rng.set_word_pos(2 * edge as u128);
    }

    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        to_unit(self.rng.next_u64())
    }
}

#[inline]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The uniform assigned to `edge` in `replica`.
pub fn uniform_at(seed: u64, replica: u64, edge: usize) -> f64 {
    let mut s = UniformStream::new(seed, replica);
    s.seek(edge);
    s.next_uniform()
}

/// Uniforms for edges `0..len` of `replica`.
pub fn uniforms(seed: u64, replica: u64, len: usize) -> Vec<f64> {
    let mut s = UniformStream::new(seed, replica);
    (0..len).map(|_| s.next_uniform()).collect()
}
