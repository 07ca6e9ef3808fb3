//! Seed expansion: stretch a short seed into a long order-`k` two-faced
//! output.
//!
//! The first `k` seed bits become the initial word of the two-faced
//! conversion; the remaining bits are a code word. With target length `N` the
//! entropy rate is `h = (|seed| − k) / N`, `π` solves `H(π) = h` on `(0, 1/2]`,
//! the code word is arithmetic-decoded into `N` Bernoulli(`π`) symbols, and the
//! conversion turns those into the output.
//!
//! Once the code word runs out the decoder reads zeros, so the tail of a long
//! expansion drifts towards the all-`π`-letter input and the output towards
//! the parity recurrence of its last context.

use crate::bits::BitSequence;
use crate::coder::{BernoulliDecoder, DEFAULT_PRECISION};
use crate::error::{argument, Result};
use crate::process::{binary_entropy, BitStream};
use crate::transform::TransformState;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const MIN_PI: f64 = 1e-9;

/// Solves `H(π) = h` for `π ∈ (0, 1/2]` by bisection.
pub fn entropy_inverse(h: f64, tol: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(argument(format!("entropy must lie in (0, 1], got {h}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(argument("tolerance must be positive"));
    }
    if h == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    let mut mid = 0.25;
    for _ in 0..2048 {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = binary_entropy(mid);
        if (value - h).abs() <= tol {
            break;
        }
        if value < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpanderConfig {
    pub order: usize,
    pub target_len: usize,
    /// Arithmetic decoder register width in bits.
    pub precision: u32,
}

impl ExpanderConfig {
    pub fn new(order: usize, target_len: usize) -> Result<Self> {
        if order == 0 {
            return Err(argument("order must be at least 1"));
        }
        if target_len == 0 {
            return Err(argument("target length must be at least 1"));
        }
        Ok(Self {
            order,
            target_len,
            precision: DEFAULT_PRECISION,
        })
    }

    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = precision;
        self
    }
}

/// Rate and Bernoulli parameter chosen for a seed length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionPlan {
    pub rate: f64,
    pub pi: f64,
}

pub fn plan(seed_len: usize, config: &ExpanderConfig) -> Result<ExpansionPlan> {
    if seed_len <= config.order {
        return Err(argument(format!(
            "seed of {seed_len} bits must be longer than the order {}",
            config.order
        )));
    }
    let code_len = seed_len - config.order;
    if code_len > config.target_len {
        return Err(argument(format!(
            "entropy rate above 1: {code_len} code bits for {} output bits",
            config.target_len
        )));
    }
    let rate = code_len as f64 / config.target_len as f64;
    let pi = entropy_inverse(rate, DEFAULT_TOLERANCE)?.clamp(MIN_PI, 0.5);
    Ok(ExpansionPlan { rate, pi })
}

/// Streaming form of [`expand`]; yields the output bits one at a time.
#[derive(Debug, Clone)]
pub struct Expander {
    decoder: BernoulliDecoder<std::vec::IntoIter<bool>>,
    transform: TransformState,
    plan: ExpansionPlan,
}

impl Expander {
    pub fn new(seed: &BitSequence, config: &ExpanderConfig) -> Result<Self> {
        let plan = plan(seed.len(), config)?;
        let initial = seed.slice(0, config.order);
        let code = seed.slice(config.order, seed.len()).into_vec();
        Ok(Self {
            decoder: BernoulliDecoder::with_precision(code.into_iter(), plan.pi, config.precision)?,
            transform: TransformState::new(config.order, &initial)?,
            plan,
        })
    }

    pub fn plan(&self) -> ExpansionPlan {
        self.plan
    }
}

impl BitStream for Expander {
    fn emit(&mut self) -> Result<bool> {
        Ok(self.transform.push(self.decoder.decode()))
    }
}

/// Expands `seed` to exactly `config.target_len` bits.
pub fn expand(seed: &BitSequence, config: &ExpanderConfig) -> Result<BitSequence> {
    Expander::new(seed, config)?.take_bits(config.target_len)
}
