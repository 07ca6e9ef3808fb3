//! Randomness inputs consumed by generation and initialization.
//!
//! Two contracts: [`BitSource`] yields unbiased independent bits and
//! [`UniformSource`] yields reals in `[0, 1)`. Every bit source is also a
//! uniform source through a fixed construction: 53 bits are read, the first
//! one most significant, and scaled by `2^-53`.
//!
//! [`CounterSource`] is the deterministic implementation. Word `i` (from 0) of
//! the stream is the SplitMix64 finalizer applied to
//! `seed + (i + 1) · 0x9E3779B97F4A7C15` (wrapping), and bits are taken from
//! each word least-significant first.

use std::fs;
use std::path::Path;

use crate::bits::BitSequence;
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub trait BitSource {
    fn next_bit(&mut self) -> Result<bool>;

    /// Reads `n ≤ 64` bits into an integer, first bit most significant.
    fn next_bits_u64(&mut self, n: u32) -> Result<u64> {
        debug_assert!(n <= 64);
        let mut acc = 0u64;
        for _ in 0..n {
            acc = (acc << 1) | self.next_bit()? as u64;
        }
        Ok(acc)
    }

    fn next_bits(&mut self, n: usize) -> Result<BitSequence> {
        let mut out = BitSequence::with_capacity(n);
        for _ in 0..n {
            out.push(self.next_bit()?);
        }
        Ok(out)
    }
}

pub trait UniformSource {
    fn next_uniform(&mut self) -> Result<f64>;
}

impl<S: BitSource + ?Sized> UniformSource for S {
    fn next_uniform(&mut self) -> Result<f64> {
        Ok(self.next_bits_u64(53)? as f64 * (1.0 / (1u64 << 53) as f64))
    }
}

impl<S: BitSource + ?Sized> BitSource for &mut S {
    fn next_bit(&mut self) -> Result<bool> {
        (**self).next_bit()
    }

    fn next_bits_u64(&mut self, n: u32) -> Result<u64> {
        (**self).next_bits_u64(n)
    }
}

impl<S: BitSource + ?Sized> BitSource for Box<S> {
    fn next_bit(&mut self) -> Result<bool> {
        (**self).next_bit()
    }

    fn next_bits_u64(&mut self, n: u32) -> Result<u64> {
        (**self).next_bits_u64(n)
    }
}

/// Deterministic counter-mode bit stream keyed by a 64-bit seed.
#[derive(Debug, Clone)]
pub struct CounterSource {
    seed: u64,
    counter: u64,
    word: u64,
    bits_left: u32,
}

impl CounterSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            counter: 0,
            word: 0,
            bits_left: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Word `i` of the stream, independent of the read position.
    pub fn word_at(seed: u64, i: u64) -> u64 {
        mix64(seed.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }

    fn refill(&mut self) {
        self.word = Self::word_at(self.seed, self.counter);
        self.counter = self.counter.wrapping_add(1);
        self.bits_left = 64;
    }
}

impl BitSource for CounterSource {
    #[inline]
    fn next_bit(&mut self) -> Result<bool> {
        if self.bits_left == 0 {
            self.refill();
        }
        let bit = self.word & 1 == 1;
        self.word >>= 1;
        self.bits_left -= 1;
        Ok(bit)
    }

    fn next_bits_u64(&mut self, n: u32) -> Result<u64> {
        debug_assert!(n <= 64);
        let mut acc = 0u64;
        let mut need = n;
        while need > 0 {
            if self.bits_left == 0 {
                self.refill();
            }
            let take = need.min(self.bits_left);
            // Bits leave the word LSB first; reverse them so the first is most significant.
            let chunk = self.word & low_mask(take);
            let reversed = chunk.reverse_bits() >> (64 - take);
            acc = if take == 64 {
                reversed
            } else {
                (acc << take) | reversed
            };
            self.word = if take == 64 { 0 } else { self.word >> take };
            self.bits_left -= take;
            need -= take;
        }
        Ok(acc)
    }
}

fn low_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Operating-system entropy, buffered 64 bits at a time.
#[derive(Debug, Default)]
pub struct OsSource {
    word: u64,
    bits_left: u32,
}

impl OsSource {
    pub fn new() -> Self {
        Self::default()
    }
}

impl BitSource for OsSource {
    fn next_bit(&mut self) -> Result<bool> {
        if self.bits_left == 0 {
            self.word = getrandom::u64().map_err(|e| Error::Source(format!("os entropy: {e}")))?;
            self.bits_left = 64;
        }
        let bit = self.word & 1 == 1;
        self.word >>= 1;
        self.bits_left -= 1;
        Ok(bit)
    }
}

/// Replays a fixed bit sequence and fails once it is exhausted.
#[derive(Debug, Clone)]
pub struct ReplaySource {
    bits: BitSequence,
    pos: usize,
}

impl ReplaySource {
    pub fn new(bits: BitSequence) -> Self {
        Self { bits, pos: 0 }
    }

    /// Packed-bit file (first bit in the least-significant position).
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path)
            .map_err(|e| Error::Source(format!("reading {}: {e}", path.display())))?;
        Ok(Self::new(BitSequence::from_packed(&bytes, None)?))
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

impl BitSource for ReplaySource {
    fn next_bit(&mut self) -> Result<bool> {
        let bit = self
            .bits
            .get(self.pos)
            .ok_or_else(|| Error::Source(format!("replay exhausted after {} bits", self.pos)))?;
        self.pos += 1;
        Ok(bit)
    }
}
