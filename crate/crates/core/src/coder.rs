//! Binary arithmetic coder for an iid Bernoulli source.
//!
//! Symbol `0` has probability `π`. The coder keeps `low` and `range` in
//! `precision`-bit registers (62 by default) and renormalizes whenever
//! `range ≤ 2^(precision−1)` by shifting out the top bit of `low`. When an
//! interval update carries out of the register the carry is propagated into
//! the bits already emitted, so no pending-bit bookkeeping is needed.
//!
//! The split point is `⌊range · p⌋` with `p = round(π · 2^32)`, clamped so both
//! subintervals are nonempty. For `π = 1/2` every split is an exact midpoint
//! and the coder degenerates to copying bits in both directions.
//!
//! At the end the encoder emits the shortest prefix that, followed by zeros,
//! lies inside the final interval. The decoder reads zeros once the code is
//! exhausted, which makes decoding total.

use crate::bits::BitSequence;
use crate::error::{argument, Result};
use crate::process::BitStream;

pub const DEFAULT_PRECISION: u32 = 62;
pub const MIN_PRECISION: u32 = 16;
const PROB_BITS: u32 = 32;

fn check_precision(precision: u32) -> Result<()> {
    if !(MIN_PRECISION..=DEFAULT_PRECISION).contains(&precision) {
        return Err(argument(format!(
            "coder precision must be in {MIN_PRECISION}..={DEFAULT_PRECISION}, got {precision}"
        )));
    }
    Ok(())
}

/// Fixed-point probability of symbol 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Model {
    p0: u64,
}

impl Model {
    fn new(pi: f64) -> Result<Self> {
        if !(pi > 0.0 && pi < 1.0) {
            return Err(argument(format!("pi must lie in (0, 1), got {pi}")));
        }
        let scale = (1u64 << PROB_BITS) as f64;
        let p0 = (pi * scale).round().clamp(1.0, scale - 1.0) as u64;
        Ok(Self { p0 })
    }

    #[inline]
    fn split(&self, range: u64) -> u64 {
        let r0 = ((range as u128 * self.p0 as u128) >> PROB_BITS) as u64;
        r0.clamp(1, range - 1)
    }
}

#[derive(Debug, Clone)]
pub struct BernoulliEncoder {
    model: Model,
    precision: u32,
    low: u64,
    range: u64,
    out: Vec<bool>,
}

impl BernoulliEncoder {
    pub fn new(pi: f64) -> Result<Self> {
        Self::with_precision(pi, DEFAULT_PRECISION)
    }

    pub fn with_precision(pi: f64, precision: u32) -> Result<Self> {
        check_precision(precision)?;
        Ok(Self {
            model: Model::new(pi)?,
            precision,
            low: 0,
            range: 1u64 << precision,
            out: Vec::new(),
        })
    }

    fn top(&self) -> u64 {
        1u64 << self.precision
    }

    fn propagate_carry(&mut self) {
        let last_zero = self
            .out
            .iter()
            .rposition(|&b| !b)
            .expect("carry out of an interval inside [0, 1)");
        self.out[last_zero] = true;
        for b in &mut self.out[last_zero + 1..] {
            *b = false;
        }
    }

    pub fn encode(&mut self, bit: bool) {
        let r0 = self.model.split(self.range);
        if bit {
            self.low += r0;
            self.range -= r0;
            if self.low >= self.top() {
                self.propagate_carry();
                self.low -= self.top();
            }
        } else {
            self.range = r0;
        }
        let half = self.top() >> 1;
        while self.range <= half {
            self.out.push(self.low >= half);
            self.low = (self.low & (half - 1)) << 1;
            self.range <<= 1;
        }
    }

    pub fn finish(mut self) -> BitSequence {
        let p = self.precision;
        let low = self.low as u128;
        let high = low + self.range as u128;
        for t in 0..=p {
            let step = 1u128 << (p - t);
            let mut v = low.div_ceil(step) * step;
            if v < high {
                if v >= self.top() as u128 {
                    self.propagate_carry();
                    v -= self.top() as u128;
                }
                for i in 0..t {
                    self.out.push((v >> (p - 1 - i)) & 1 == 1);
                }
                break;
            }
        }
        BitSequence::from(self.out)
    }
}

/// Streaming decoder over a code bit iterator, zero-padded when exhausted.
#[derive(Debug, Clone)]
pub struct BernoulliDecoder<I> {
    model: Model,
    precision: u32,
    range: u64,
    offset: u64,
    code: I,
    code_bits_read: u64,
}

impl<I: Iterator<Item = bool>> BernoulliDecoder<I> {
    pub fn new(code: I, pi: f64) -> Result<Self> {
        Self::with_precision(code, pi, DEFAULT_PRECISION)
    }

    pub fn with_precision(code: I, pi: f64, precision: u32) -> Result<Self> {
        check_precision(precision)?;
        let mut dec = Self {
            model: Model::new(pi)?,
            precision,
            range: 1u64 << precision,
            offset: 0,
            code,
            code_bits_read: 0,
        };
        for _ in 0..precision {
            dec.offset = (dec.offset << 1) | dec.next_code_bit() as u64;
        }
        Ok(dec)
    }

    fn next_code_bit(&mut self) -> bool {
        match self.code.next() {
            Some(b) => {
                self.code_bits_read += 1;
                b
            }
            None => false,
        }
    }

    /// Real code bits pulled so far (padding excluded).
    pub fn code_bits_read(&self) -> u64 {
        self.code_bits_read
    }

    pub fn decode(&mut self) -> bool {
        let r0 = self.model.split(self.range);
        let bit = if self.offset < r0 {
            self.range = r0;
            false
        } else {
            self.offset -= r0;
            self.range -= r0;
            true
        };
        let half = 1u64 << (self.precision - 1);
        while self.range <= half {
            self.range <<= 1;
            self.offset = (self.offset << 1) | self.next_code_bit() as u64;
        }
        bit
    }
}

impl<I: Iterator<Item = bool>> BitStream for BernoulliDecoder<I> {
    fn emit(&mut self) -> Result<bool> {
        Ok(self.decode())
    }
}

pub fn bernoulli_encode(x: &BitSequence, pi: f64) -> Result<BitSequence> {
    bernoulli_encode_with_precision(x, pi, DEFAULT_PRECISION)
}

pub fn bernoulli_encode_with_precision(
    x: &BitSequence,
    pi: f64,
    precision: u32,
) -> Result<BitSequence> {
    let mut enc = BernoulliEncoder::with_precision(pi, precision)?;
    for b in x.iter() {
        enc.encode(b);
    }
    Ok(enc.finish())
}

/// Decodes exactly `n` symbols.
pub fn bernoulli_decode(code: &BitSequence, pi: f64, n: usize) -> Result<BitSequence> {
    bernoulli_decode_with_precision(code, pi, n, DEFAULT_PRECISION)
}

pub fn bernoulli_decode_with_precision(
    code: &BitSequence,
    pi: f64,
    n: usize,
    precision: u32,
) -> Result<BitSequence> {
    let mut dec = BernoulliDecoder::with_precision(code.iter(), pi, precision)?;
    Ok((0..n).map(|_| dec.decode()).collect())
}
