//! Deterministic, splittable random streams.
//!
//! A stream is a ChaCha8 keystream whose 256-bit key is derived from a root
//! seed and a path of integers (for example `[n, trial]`). Children never
//! depend on how much of the parent has been consumed, so results do not
//! depend on scheduling or on how many sibling tasks exist.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    key: [u64; 4],
    inner: ChaCha8Rng,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn absorb(key: [u64; 4], word: u64) -> [u64; 4] {
    let mut out = [0u64; 4];
    let mut acc = splitmix64(word ^ 0xA076_1D64_78BD_642F);
    for (i, k) in key.iter().enumerate() {
        acc = splitmix64(acc ^ k.rotate_left(17 * i as u32 + 1));
        out[i] = acc;
    }
    out
}

fn rng_from_key(key: [u64; 4]) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    for (chunk, word) in bytes.chunks_exact_mut(8).zip(key) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        let key = absorb([0x6A09_E667_F3BC_C908, 0xBB67_AE85_84CA_A73B, 0x3C6E_F372_FE94_F82B, 0xA54F_F53A_5F1D_36F1], seed);
        Self {
            key,
            inner: rng_from_key(key),
        }
    }

    /// Derives an independent child stream keyed by `path`.
    pub fn child(&self, path: &[u64]) -> Self {
        // length-prefix so [a] and [a, 0] differ
        let mut key = absorb(self.key, path.len() as u64);
        for &p in path {
            key = absorb(key, p);
        }
        Self {
            key,
            inner: rng_from_key(key),
        }
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RandomStream {
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
