//! Reproducible random streams.
//!
//! Every stream is a PCG32 generator (64-bit LCG state, XSH-RR output) created
//! with the reference `pcg32_srandom(seed, stream_id)` initialization, so any
//! implementation of PCG32 reproduces the same `u32` sequence. The derived
//! quantities are defined on top of that sequence:
//!
//! * `next_u64` = `lo | (hi << 32)` where `lo` is drawn before `hi`.
//! * `uniform()` = `((next_u64 >> 11) + 0.5) · 2⁻⁵³`, always inside (0, 1).
//! * `below(n)` = rejection sampling on `next_u32` (zone `2³² − 2³² mod n`)
//!   when `n` fits in 32 bits, else on `next_u64`.
//! * `derive(purpose)` = a fresh stream with seed
//!   `splitmix64(seed ^ splitmix64(purpose))` and the same stream id.

use rand_core::Rng;
use rand_pcg::Pcg32;

use crate::error::{AgeError, Result};

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream_id: u64,
    inner: Pcg32,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        SeededRng {
            seed,
            stream_id,
            inner: Pcg32::new(seed, stream_id),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Independent substream for a named purpose; does not advance `self`.
    pub fn derive(&self, purpose: u64) -> SeededRng {
        SeededRng::new(splitmix64(self.seed ^ splitmix64(purpose)), self.stream_id)
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let lo = self.next_u32() as u64;
        let hi = self.next_u32() as u64;
        lo | (hi << 32)
    }

    /// Uniform draw on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. Panics when `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        if n <= u32::MAX as u64 {
            let n32 = n as u32;
            let zone = u32::MAX - (u32::MAX - n32 + 1) % n32;
            loop {
                let x = self.next_u32();
                if x <= zone {
                    return (x % n32) as usize;
                }
            }
        } else {
            let zone = u64::MAX - (u64::MAX - n + 1) % n;
            loop {
                let x = self.next_u64();
                if x <= zone {
                    return (x % n) as usize;
                }
            }
        }
    }

    /// Fisher–Yates shuffle, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `k` distinct elements drawn uniformly without replacement, in draw order.
    pub fn sample<T: Copy>(&mut self, items: &[T], k: usize) -> Vec<T> {
        assert!(k <= items.len(), "sample of {k} from {}", items.len());
        let mut pool = items.to_vec();
        for i in 0..k {
            let j = i + self.below(pool.len() - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Beta(1, n) draw by inverse transform: `1 − U^(1/n)`.
pub fn sample_beta_1_n(rng: &mut SeededRng, n: f64) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(AgeError::Parameter(format!("Beta(1, n) needs n > 0, got {n}")));
    }
    let u = rng.uniform();
    let x = 1.0 - u.powf(1.0 / n);
    // Rounding can land exactly on 0 when n is large.
    Ok(x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
}
