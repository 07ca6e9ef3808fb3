//! The two-faced conversion: a deterministic map from an input bit stream and
//! a `k`-bit initial word to an output stream.
//!
//! Output bit `y_i` is the letter whose conditional probability under the
//! order-`k` kernel, given the previous `k` outputs, is `π` when `x_i = 0` and
//! `1 − π` when `x_i = 1`. The choice never depends on the numeric value of
//! `π`, and for the plain family it reduces to `y_i = x_i ⊕ parity(context)`.
//! Feeding Bernoulli input with `P(x_i = 0) = π` therefore produces a sample
//! path of `T(k, π)`.

use crate::bits::BitSequence;
use crate::error::{argument, Result};
use crate::kernel::{Context, KernelTable, Symbol, Variant};

/// The letter `w` with `P(w | context) = π`, from the parity closed form.
#[inline]
fn pi_letter(variant: Variant, parity: bool) -> bool {
    match variant {
        Variant::Plain => parity,
        Variant::Bar => !parity,
    }
}

/// Selector `M_k(x, context)` for the plain family.
pub fn m_select(order: usize, x: bool, context: &Context) -> Result<bool> {
    m_select_variant(Variant::Plain, order, x, context)
}

pub fn m_select_variant(
    variant: Variant,
    order: usize,
    x: bool,
    context: &Context,
) -> Result<bool> {
    if context.len() != order {
        return Err(argument(format!(
            "context has {} bits, order is {order}",
            context.len()
        )));
    }
    Ok(x ^ pi_letter(variant, context.parity()))
}

/// Selector read off a materialized kernel table: `x = 0` picks the letter
/// whose table entry is `π`, `x = 1` the letter whose entry is `1 − π`.
pub fn m_select_from_table(table: &KernelTable, x: bool, context_index: usize) -> bool {
    let zero_is_pi = table.zero_symbol(context_index) == Symbol::Pi;
    let letter_for_pi = !zero_is_pi;
    if x {
        !letter_for_pi
    } else {
        letter_for_pi
    }
}

/// Streaming conversion state: the last `k` outputs and the input count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformState {
    variant: Variant,
    context: Context,
    consumed: u64,
}

impl TransformState {
    pub fn new(order: usize, initial: &BitSequence) -> Result<Self> {
        Self::with_variant(Variant::Plain, order, initial)
    }

    pub fn with_variant(variant: Variant, order: usize, initial: &BitSequence) -> Result<Self> {
        if order == 0 {
            return Err(argument("transform order must be at least 1"));
        }
        if initial.len() != order {
            return Err(argument(format!(
                "initial word has {} bits, order is {order}",
                initial.len()
            )));
        }
        Ok(Self {
            variant,
            context: Context::from_sequence(initial),
            consumed: 0,
        })
    }

    pub fn order(&self) -> usize {
        self.context.len()
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    #[inline]
    pub fn push(&mut self, x: bool) -> bool {
        let y = x ^ pi_letter(self.variant, self.context.parity());
        self.context.shift_in(y);
        self.consumed += 1;
        y
    }

    /// Converts one chunk; state carries over to the next call.
    pub fn process(&mut self, input: &BitSequence) -> BitSequence {
        input.iter().map(|x| self.push(x)).collect()
    }
}

/// `τ^k(x, v)` for the plain family.
pub fn transform(order: usize, input: &BitSequence, initial: &BitSequence) -> Result<BitSequence> {
    Ok(TransformState::new(order, initial)?.process(input))
}

pub fn transform_variant(
    variant: Variant,
    order: usize,
    input: &BitSequence,
    initial: &BitSequence,
) -> Result<BitSequence> {
    Ok(TransformState::with_variant(variant, order, initial)?.process(input))
}

/// Recovers the input from an output stream and the same initial word.
pub fn inverse_transform(
    variant: Variant,
    order: usize,
    output: &BitSequence,
    initial: &BitSequence,
) -> Result<BitSequence> {
    // Run the forward state on the known outputs and read off x_i = y_i ⊕ letter.
    let mut state = TransformState::with_variant(variant, order, initial)?;
    Ok(output
        .iter()
        .map(|y| {
            let x = y ^ pi_letter(variant, state.context.parity());
            state.context.shift_in(y);
            state.consumed += 1;
            x
        })
        .collect())
}
