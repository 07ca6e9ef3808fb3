//! Sampling from a kernel and exact finite-horizon laws of the induced chain.
//!
//! The chain state is the last `k` emitted bits; states are indexed by their
//! big-endian value (oldest bit most significant), so the successor of state
//! `s` after emitting `b` is `((s << 1) | b) & (2^k − 1)`.

use crate::bits::BitSequence;
use crate::error::{argument, Error, Result};
use crate::kernel::{Context, KernelSpec, TABLE_CAP};
use crate::source::{BitSource, UniformSource};

/// Longest block beyond the kernel order that exact laws extend to.
pub const EXTENSION_CAP: usize = 8;
/// Absolute cap on exact block length (`2^24` doubles).
pub const BLOCK_CAP: usize = 24;

/// Anything that produces bits one at a time.
pub trait BitStream {
    fn emit(&mut self) -> Result<bool>;

    fn take_bits(&mut self, n: usize) -> Result<BitSequence> {
        let mut out = BitSequence::with_capacity(n);
        for _ in 0..n {
            out.push(self.emit()?);
        }
        Ok(out)
    }

    fn skip(&mut self, n: usize) -> Result<()> {
        for _ in 0..n {
            self.emit()?;
        }
        Ok(())
    }
}

impl<S: BitStream + ?Sized> BitStream for Box<S> {
    fn emit(&mut self) -> Result<bool> {
        (**self).emit()
    }
}

/// Kernel plus the sliding `k`-bit context of the last emitted bits.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorState {
    kernel: KernelSpec,
    context: Context,
    steps_emitted: u64,
}

impl GeneratorState {
    /// Draws the initial context uniformly by copying `k` source bits.
    pub fn init_uniform<S: BitSource + ?Sized>(kernel: KernelSpec, source: &mut S) -> Result<Self> {
        let word = source.next_bits(kernel.order())?;
        Ok(Self {
            kernel,
            context: Context::from_sequence(&word),
            steps_emitted: 0,
        })
    }

    pub fn init_fixed(kernel: KernelSpec, word: &BitSequence) -> Result<Self> {
        if word.len() != kernel.order() {
            return Err(argument(format!(
                "initial word has {} bits, kernel order is {}",
                word.len(),
                kernel.order()
            )));
        }
        Ok(Self {
            kernel,
            context: Context::from_sequence(word),
            steps_emitted: 0,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn steps_emitted(&self) -> u64 {
        self.steps_emitted
    }

    /// Emits 0 iff the uniform draw is below `P(0 | context)`.
    pub fn next_bit<S: UniformSource + ?Sized>(&mut self, source: &mut S) -> Result<bool> {
        let draw = source.next_uniform()?;
        let p0 = self.kernel.p_zero_for_parity(self.context.parity());
        let bit = draw >= p0;
        self.context.shift_in(bit);
        self.steps_emitted += 1;
        Ok(bit)
    }

    pub fn generate<S: UniformSource + ?Sized>(
        &mut self,
        n: usize,
        source: &mut S,
    ) -> Result<BitSequence> {
        let mut out = BitSequence::with_capacity(n);
        for _ in 0..n {
            out.push(self.next_bit(source)?);
        }
        Ok(out)
    }
}

/// A generator bundled with the source it draws from.
#[derive(Debug, Clone)]
pub struct Generator<S> {
    state: GeneratorState,
    source: S,
}

impl<S: BitSource> Generator<S> {
    /// Uniform initial context taken from the same source.
    pub fn new(kernel: KernelSpec, mut source: S) -> Result<Self> {
        let state = GeneratorState::init_uniform(kernel, &mut source)?;
        Ok(Self { state, source })
    }

    pub fn with_initial(kernel: KernelSpec, word: &BitSequence, source: S) -> Result<Self> {
        Ok(Self {
            state: GeneratorState::init_fixed(kernel, word)?,
            source,
        })
    }

    pub fn state(&self) -> &GeneratorState {
        &self.state
    }
}

impl<S: BitSource> BitStream for Generator<S> {
    fn emit(&mut self) -> Result<bool> {
        self.state.next_bit(&mut self.source)
    }
}

/// Probability vector over the `2^k` chain states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution {
    order: usize,
    probs: Vec<f64>,
}

impl StateDistribution {
    pub fn new(order: usize, probs: Vec<f64>) -> Result<Self> {
        check_table_order(order)?;
        if probs.len() != 1usize << order {
            return Err(argument(format!(
                "state distribution of order {order} needs {} entries, got {}",
                1usize << order,
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(argument("state probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(argument(format!(
                "state probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { order, probs })
    }

    pub fn uniform(order: usize) -> Result<Self> {
        check_table_order(order)?;
        let n = 1usize << order;
        Ok(Self {
            order,
            probs: vec![1.0 / n as f64; n],
        })
    }

    /// All mass on the state with big-endian value `state`.
    pub fn point(order: usize, state: usize) -> Result<Self> {
        check_table_order(order)?;
        let n = 1usize << order;
        if state >= n {
            return Err(argument(format!(
                "state {state} out of range for order {order}"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[state] = 1.0;
        Ok(Self { order, probs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Distribution after one step of the chain.
    pub fn propagate(&self, kernel: &KernelSpec) -> Result<Self> {
        if kernel.order() != self.order {
            return Err(argument("kernel order differs from distribution order"));
        }
        let mask = (1usize << self.order) - 1;
        let mut next = vec![0.0; self.probs.len()];
        for (s, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let p0 = kernel.p_zero_for_parity(s.count_ones() % 2 == 1);
            let base = (s << 1) & mask;
            next[base] += p * p0;
            next[base | 1] += p * (1.0 - p0);
        }
        Ok(Self {
            order: self.order,
            probs: next,
        })
    }

    pub fn propagate_steps(&self, kernel: &KernelSpec, steps: usize) -> Result<Self> {
        let mut dist = self.clone();
        for _ in 0..steps {
            dist = dist.propagate(kernel)?;
        }
        Ok(dist)
    }

    pub fn max_abs_deviation_from_uniform(&self) -> f64 {
        max_abs_deviation_from_uniform(&self.probs)
    }

    pub fn total_variation_to_uniform(&self) -> f64 {
        total_variation_to_uniform(&self.probs)
    }
}

pub fn max_abs_deviation_from_uniform(probs: &[f64]) -> f64 {
    let u = 1.0 / probs.len() as f64;
    probs.iter().fold(0.0f64, |m, &p| m.max((p - u).abs()))
}

pub fn total_variation_to_uniform(probs: &[f64]) -> f64 {
    let u = 1.0 / probs.len() as f64;
    0.5 * probs.iter().map(|&p| (p - u).abs()).sum::<f64>()
}

fn check_table_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(argument("order must be at least 1"));
    }
    if order > TABLE_CAP {
        return Err(Error::Capacity {
            what: "kernel order",
            requested: order,
            cap: TABLE_CAP,
        });
    }
    Ok(())
}

fn check_block_len(kernel: &KernelSpec, block_len: usize) -> Result<()> {
    let cap = (kernel.order() + EXTENSION_CAP).min(BLOCK_CAP);
    if block_len > cap {
        return Err(Error::Capacity {
            what: "block length",
            requested: block_len,
            cap,
        });
    }
    Ok(())
}

/// Extends a law over `len`-bit paths by one more emitted bit.
fn extend_paths(kernel: &KernelSpec, paths: &[f64]) -> Vec<f64> {
    let state_mask = (1usize << kernel.order()) - 1;
    let mut next = vec![0.0; paths.len() * 2];
    for (w, &p) in paths.iter().enumerate() {
        let p0 = kernel.p_zero_for_parity((w & state_mask).count_ones() % 2 == 1);
        next[2 * w] = p * p0;
        next[2 * w + 1] = p * (1.0 - p0);
    }
    next
}

/// Exact law of the block `x_{j+1} … x_{j+m}`, indexed by big-endian word
/// value, when the first `k` bits have law `initial`.
pub fn exact_block_distribution(
    kernel: &KernelSpec,
    initial: &StateDistribution,
    offset: usize,
    block_len: usize,
) -> Result<Vec<f64>> {
    check_table_order(kernel.order())?;
    if block_len == 0 {
        return Err(argument("block length must be at least 1"));
    }
    check_block_len(kernel, block_len)?;
    let k = kernel.order();
    let state = initial.propagate_steps(kernel, offset)?;
    if block_len <= k {
        let shift = k - block_len;
        let mut out = vec![0.0; 1usize << block_len];
        for (s, &p) in state.probs.iter().enumerate() {
            out[s >> shift] += p;
        }
        return Ok(out);
    }
    let mut paths = state.probs;
    for _ in k..block_len {
        paths = extend_paths(kernel, &paths);
    }
    Ok(paths)
}

/// `−(p log₂ p + (1−p) log₂(1−p))` with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Limit entropy of `T(k, π)`, i.e. the binary entropy of `π`.
pub fn limit_entropy(pi: f64) -> Result<f64> {
    if !(pi > 0.0 && pi < 1.0) {
        return Err(argument(format!("pi must lie in (0, 1), got {pi}")));
    }
    Ok(binary_entropy(pi))
}

/// Order-`m` conditional entropy of the stationary process, in bits:
/// `Σ_u μ(u) Σ_v −μ(v|u) log₂ μ(v|u)` over `(m−1)`-words `u`.
pub fn exact_conditional_entropy(kernel: &KernelSpec, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(argument("entropy order must be at least 1"));
    }
    let stationary = StateDistribution::uniform(kernel.order())?;
    let law = exact_block_distribution(kernel, &stationary, 0, m)?;
    Ok(conditional_entropy_of_law(&law))
}

/// Conditional entropy of the last bit given the preceding ones, for a law over
/// `m`-bit words indexed big-endian.
pub(crate) fn conditional_entropy_of_law(law: &[f64]) -> f64 {
    law.chunks_exact(2)
        .map(|pair| {
            let ctx = pair[0] + pair[1];
            if ctx <= 0.0 {
                return 0.0;
            }
            ctx * binary_entropy(pair[0] / ctx)
        })
        .sum()
}

/// Number of steps after which the `k`-block marginal is within `tol` of
/// uniform in total variation, or `None` if that takes more than `max_steps`.
pub fn steps_to_uniform(
    kernel: &KernelSpec,
    initial: &StateDistribution,
    tol: f64,
    max_steps: usize,
) -> Result<Option<usize>> {
    let mut dist = initial.clone();
    for j in 0..=max_steps {
        if dist.total_variation_to_uniform() < tol {
            return Ok(Some(j));
        }
        dist = dist.propagate(kernel)?;
    }
    Ok(None)
}
