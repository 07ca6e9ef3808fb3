//! The `T(k, π)` and `T̄(k, π)` transition kernel families.
//!
//! Each kernel is an order-`k` binary Markov kernel whose conditional
//! probabilities are always either `π` or `1 − π`. The families are defined by
//! mutual recursion on the oldest context bit:
//!
//! ```text
//! T(k+1)(b | 0u) = T(k)(b | u)      T̄(k+1)(b | 0u) = T̄(k)(b | u)
//! T(k+1)(b | 1u) = T̄(k)(b | u)      T̄(k+1)(b | 1u) = T(k)(b | u)
//! ```
//!
//! with `T(1)(0|0) = π`, `T(1)(0|1) = 1 − π` and `T̄(1)` the mirror image.
//! Unrolling the recursion gives the closed form used on the hot path:
//! `T(k)(0 | u) = π` iff the parity of `u` is even (odd for `T̄`).
//!
//! Probabilities are carried as a [`Symbol`] and only turned into `f64` at the
//! boundary, so the recursive and closed-form routes can be compared exactly.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::bits::BitSequence;
use crate::error::{argument, Error, Result};

/// Largest order for which full `2^k`-row tables are materialized.
pub const TABLE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `T(k, π)`
    Plain,
    /// `T̄(k, π)`
    Bar,
}

impl Variant {
    pub fn flipped(self) -> Self {
        match self {
            Variant::Plain => Variant::Bar,
            Variant::Bar => Variant::Plain,
        }
    }

    fn index(self) -> usize {
        match self {
            Variant::Plain => 0,
            Variant::Bar => 1,
        }
    }
}

/// One of the two values a kernel probability can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Pi,
    OneMinusPi,
}

impl Symbol {
    pub fn complement(self) -> Self {
        match self {
            Symbol::Pi => Symbol::OneMinusPi,
            Symbol::OneMinusPi => Symbol::Pi,
        }
    }

    pub fn value(self, pi: f64) -> f64 {
        match self {
            Symbol::Pi => pi,
            Symbol::OneMinusPi => 1.0 - pi,
        }
    }
}

/// Order-`k` kernel of either family with parameter `π ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    variant: Variant,
    order: usize,
    pi: f64,
}

impl KernelSpec {
    pub fn new(variant: Variant, order: usize, pi: f64) -> Result<Self> {
        if order == 0 {
            return Err(argument("kernel order must be at least 1"));
        }
        // Degenerate π would make some transitions impossible and break ergodicity.
        if !(pi > 0.0 && pi < 1.0) {
            return Err(argument(format!("pi must lie in (0, 1), got {pi}")));
        }
        Ok(Self { variant, order, pi })
    }

    pub fn plain(order: usize, pi: f64) -> Result<Self> {
        Self::new(Variant::Plain, order, pi)
    }

    pub fn bar(order: usize, pi: f64) -> Result<Self> {
        Self::new(Variant::Bar, order, pi)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn pi(&self) -> f64 {
        self.pi
    }

    /// Symbol of `P(0 | context)` given only the context parity.
    pub fn zero_symbol_for_parity(&self, parity: bool) -> Symbol {
        // Plain: even parity → π. Bar: odd parity → π.
        let even_is_pi = self.variant == Variant::Plain;
        if parity != even_is_pi {
            Symbol::Pi
        } else {
            Symbol::OneMinusPi
        }
    }

    /// `P(0 | context)` as a float, given the context parity.
    #[inline]
    pub fn p_zero_for_parity(&self, parity: bool) -> f64 {
        self.zero_symbol_for_parity(parity).value(self.pi)
    }
}

/// The last `k` bits of a process, oldest first, with their parity cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    bits: VecDeque<bool>,
    parity: bool,
}

impl Context {
    pub fn new(bits: &[bool]) -> Self {
        Self {
            bits: bits.iter().copied().collect(),
            parity: bits.iter().fold(false, |p, &b| p ^ b),
        }
    }

    pub fn from_sequence(seq: &BitSequence) -> Self {
        Self::new(seq.as_slice())
    }

    /// `len`-bit context whose big-endian value is `index`.
    pub fn from_index(index: u64, len: usize) -> Self {
        Self::from_sequence(&BitSequence::from_index(index, len))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// XOR of all context bits.
    pub fn parity(&self) -> bool {
        self.parity
    }

    /// Drops the oldest bit and appends `bit` as the most recent one.
    #[inline]
    pub fn shift_in(&mut self, bit: bool) {
        if let Some(oldest) = self.bits.pop_front() {
            self.parity ^= oldest;
        }
        self.bits.push_back(bit);
        self.parity ^= bit;
    }

    pub fn to_vec(&self) -> Vec<bool> {
        self.bits.iter().copied().collect()
    }

    pub fn to_sequence(&self) -> BitSequence {
        self.bits.iter().copied().collect()
    }
}

fn check_len(spec: &KernelSpec, context: &Context) -> Result<()> {
    if context.len() != spec.order {
        return Err(argument(format!(
            "context has {} bits, kernel order is {}",
            context.len(),
            spec.order
        )));
    }
    Ok(())
}

fn base_zero_symbol(variant: Variant, bit: bool) -> Symbol {
    match (variant, bit) {
        (Variant::Plain, false) | (Variant::Bar, true) => Symbol::Pi,
        (Variant::Plain, true) | (Variant::Bar, false) => Symbol::OneMinusPi,
    }
}

fn recurse(variant: Variant, next_bit: bool, context: &[bool]) -> Symbol {
    match context {
        [] => unreachable!("order is at least 1"),
        [last] => {
            let zero = base_zero_symbol(variant, *last);
            if next_bit {
                zero.complement()
            } else {
                zero
            }
        }
        [oldest, rest @ ..] => {
            let lower = if *oldest { variant.flipped() } else { variant };
            recurse(lower, next_bit, rest)
        }
    }
}

/// Symbol of `P(next_bit | context)` by direct recursion down to order 1.
pub fn cond_symbol_recursive(
    spec: &KernelSpec,
    next_bit: bool,
    context: &Context,
) -> Result<Symbol> {
    check_len(spec, context)?;
    Ok(recurse(spec.variant, next_bit, &context.to_vec()))
}

/// `P(next_bit | context)` by direct recursion down to order 1.
pub fn cond_prob_recursive(spec: &KernelSpec, next_bit: bool, context: &Context) -> Result<f64> {
    cond_symbol_recursive(spec, next_bit, context).map(|s| s.value(spec.pi))
}

/// Symbol of `P(next_bit | context)` from the parity closed form.
pub fn cond_symbol(spec: &KernelSpec, next_bit: bool, context: &Context) -> Result<Symbol> {
    check_len(spec, context)?;
    let zero = spec.zero_symbol_for_parity(context.parity());
    Ok(if next_bit { zero.complement() } else { zero })
}

/// `P(next_bit | context)` from the parity closed form.
pub fn cond_prob(spec: &KernelSpec, next_bit: bool, context: &Context) -> Result<f64> {
    cond_symbol(spec, next_bit, context).map(|s| s.value(spec.pi))
}

/// Kernels of both families built level by level from the recursion, so every
/// level is computed once and shared by both families at the next level.
///
/// `levels[k-1][variant]` holds the `P(0 | u)` symbols of the order-`k` kernel,
/// indexed by the big-endian value of `u`.
#[derive(Debug, Clone)]
pub struct RecursiveTables {
    levels: Vec<[Vec<Symbol>; 2]>,
}

impl RecursiveTables {
    pub fn build(max_order: usize) -> Result<Self> {
        if max_order > TABLE_CAP {
            return Err(Error::Capacity {
                what: "kernel order",
                requested: max_order,
                cap: TABLE_CAP,
            });
        }
        let mut levels: Vec<[Vec<Symbol>; 2]> = Vec::with_capacity(max_order);
        if max_order == 0 {
            return Ok(Self { levels });
        }
        levels.push([
            vec![Symbol::Pi, Symbol::OneMinusPi],
            vec![Symbol::OneMinusPi, Symbol::Pi],
        ]);
        for k in 1..max_order {
            let prev = &levels[k - 1];
            let half = 1usize << k;
            let build = |variant: Variant| -> Vec<Symbol> {
                // Rows 0u copy the same family, rows 1u the other one.
                let mut row = Vec::with_capacity(2 * half);
                row.extend_from_slice(&prev[variant.index()]);
                row.extend_from_slice(&prev[variant.flipped().index()]);
                row
            };
            let next = [build(Variant::Plain), build(Variant::Bar)];
            levels.push(next);
        }
        Ok(Self { levels })
    }

    pub fn max_order(&self) -> usize {
        self.levels.len()
    }

    /// `P(0 | u)` symbols for the order-`order` kernel of `variant`.
    pub fn zero_symbols(&self, variant: Variant, order: usize) -> Option<&[Symbol]> {
        self.levels
            .get(order.checked_sub(1)?)
            .map(|pair| pair[variant.index()].as_slice())
    }
}

/// Materialized `2^k × 2` table of conditional probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    spec: KernelSpec,
    zero: Vec<Symbol>,
}

impl KernelTable {
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.zero.len()
    }

    pub fn zero_symbol(&self, context_index: usize) -> Symbol {
        self.zero[context_index]
    }

    /// `P(0 | u)` for the context with big-endian value `context_index`.
    pub fn p0(&self, context_index: usize) -> f64 {
        self.zero[context_index].value(self.spec.pi)
    }

    pub fn p1(&self, context_index: usize) -> f64 {
        self.zero[context_index].complement().value(self.spec.pi)
    }

    /// `context,p0,p1` with contexts in lexicographic order and probabilities
    /// printed with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let k = self.spec.order;
        let mut out = String::from("context,p0,p1\n");
        for i in 0..self.rows() {
            let ctx = BitSequence::from_index(i as u64, k);
            let _ = writeln!(
                out,
                "{},{},{}",
                ctx,
                format_sig17(self.p0(i)),
                format_sig17(self.p1(i))
            );
        }
        out
    }
}

/// Plain decimal with 17 significant digits.
pub(crate) fn format_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Materializes the kernel from the closed form; capped at [`TABLE_CAP`].
pub fn kernel_table(spec: &KernelSpec) -> Result<KernelTable> {
    kernel_table_with_cap(spec, TABLE_CAP)
}

pub fn kernel_table_with_cap(spec: &KernelSpec, cap: usize) -> Result<KernelTable> {
    if spec.order > cap {
        return Err(Error::Capacity {
            what: "kernel order",
            requested: spec.order,
            cap,
        });
    }
    let zero = (0..1usize << spec.order)
        .map(|i| spec.zero_symbol_for_parity(i.count_ones() % 2 == 1))
        .collect();
    Ok(KernelTable { spec: *spec, zero })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(s: &str) -> Context {
        Context::from_sequence(&s.parse().unwrap())
    }

    const PI: f64 = 0.2;

    #[test]
    fn worked_order_two_values() {
        let t2 = KernelSpec::plain(2, PI).unwrap();
        for (c, expected) in [
            ("00", Symbol::Pi),
            ("01", Symbol::OneMinusPi),
            ("10", Symbol::OneMinusPi),
            ("11", Symbol::Pi),
        ] {
            assert_eq!(
                cond_symbol_recursive(&t2, false, &ctx(c)).unwrap(),
                expected
            );
            assert_eq!(cond_symbol(&t2, false, &ctx(c)).unwrap(), expected);
        }
    }

    #[test]
    fn base_cases() {
        let bar1 = KernelSpec::bar(1, PI).unwrap();
        assert_eq!(
            cond_prob_recursive(&bar1, false, &ctx("0")).unwrap(),
            1.0 - PI
        );
        assert_eq!(cond_prob_recursive(&bar1, false, &ctx("1")).unwrap(), PI);
        let t1 = KernelSpec::plain(1, PI).unwrap();
        assert_eq!(cond_prob_recursive(&t1, false, &ctx("0")).unwrap(), PI);
        assert_eq!(cond_prob_recursive(&t1, true, &ctx("0")).unwrap(), 1.0 - PI);
    }

    #[test]
    fn closed_form_examples() {
        let t3 = KernelSpec::plain(3, PI).unwrap();
        assert_eq!(cond_prob(&t3, true, &ctx("110")).unwrap(), 1.0 - PI);
        let bar2 = KernelSpec::bar(2, PI).unwrap();
        assert_eq!(cond_prob(&bar2, false, &ctx("00")).unwrap(), 1.0 - PI);
        // Same values by hand-unrolling the recursion:
        // T3(1|110) = T̄2(1|10) = T1(1|0) = 1 − π ; T̄2(0|00) = T̄1(0|0) = 1 − π.
        assert_eq!(
            cond_prob_recursive(&t3, true, &ctx("110")).unwrap(),
            1.0 - PI
        );
        assert_eq!(
            cond_prob_recursive(&bar2, false, &ctx("00")).unwrap(),
            1.0 - PI
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(KernelSpec::plain(0, 0.3).is_err());
        assert!(KernelSpec::plain(2, 0.0).is_err());
        assert!(KernelSpec::plain(2, 1.0).is_err());
        assert!(KernelSpec::plain(2, f64::NAN).is_err());
        assert!(KernelSpec::plain(2, 0.5).is_ok());
        let t2 = KernelSpec::plain(2, 0.3).unwrap();
        assert!(matches!(
            cond_prob(&t2, false, &ctx("011")),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            cond_prob_recursive(&t2, false, &ctx("0")),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn all_routes_agree_exhaustively() {
        let tables = RecursiveTables::build(12).unwrap();
        for k in 1..=12 {
            for variant in [Variant::Plain, Variant::Bar] {
                let spec = KernelSpec::new(variant, k, 0.3).unwrap();
                let rows = tables.zero_symbols(variant, k).unwrap();
                for i in 0..1u64 << k {
                    let c = Context::from_index(i, k);
                    for b in [false, true] {
                        let rec = cond_symbol_recursive(&spec, b, &c).unwrap();
                        let closed = cond_symbol(&spec, b, &c).unwrap();
                        assert_eq!(rec, closed, "k={k} {variant:?} u={i:b} b={b}");
                    }
                    assert_eq!(rows[i as usize], cond_symbol(&spec, false, &c).unwrap());
                }
            }
        }
    }

    #[test]
    fn family_properties() {
        for k in 1..=10 {
            let t = KernelSpec::plain(k, 0.3).unwrap();
            let tb = KernelSpec::bar(k, 0.3).unwrap();
            for i in 0..1u64 << k {
                let c = Context::from_index(i, k);
                for b in [false, true] {
                    // Complementary families.
                    assert_eq!(
                        cond_symbol(&tb, b, &c).unwrap(),
                        cond_symbol(&t, !b, &c).unwrap()
                    );
                }
                assert_eq!(
                    cond_prob(&t, false, &c).unwrap() + cond_prob(&t, true, &c).unwrap(),
                    1.0
                );
            }
            // Column property: P(b | 0u') + P(b | 1u') = 1.
            for tail in 0..1u64 << (k - 1) {
                let c0 = Context::from_index(tail, k);
                let c1 = Context::from_index(tail | 1 << (k - 1), k);
                for b in [false, true] {
                    let s = cond_prob(&t, b, &c0).unwrap() + cond_prob(&t, b, &c1).unwrap();
                    assert_eq!(s, 1.0);
                }
            }
        }
    }

    #[test]
    fn table_rows_and_cap() {
        let t = kernel_table(&KernelSpec::plain(1, 0.3).unwrap()).unwrap();
        assert_eq!(t.p0(0), 0.3);
        assert_eq!(t.p0(1), 0.7);
        let half = kernel_table(&KernelSpec::plain(5, 0.5).unwrap()).unwrap();
        assert!((0..half.rows()).all(|i| half.p0(i) == 0.5 && half.p1(i) == 0.5));
        let big = KernelSpec::plain(21, 0.3).unwrap();
        assert!(matches!(kernel_table(&big), Err(Error::Capacity { .. })));
        assert!(RecursiveTables::build(21).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = kernel_table(&KernelSpec::plain(1, 0.3).unwrap()).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "context,p0,p1");
        assert_eq!(lines[1], "0,0.29999999999999999,0.69999999999999996");
        assert_eq!(lines[2], "1,0.69999999999999996,0.29999999999999999");
        let p: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(p, 0.3);
    }

    #[test]
    fn context_shift_tracks_parity() {
        let mut c = ctx("101");
        assert!(!c.parity());
        c.shift_in(true);
        assert_eq!(c.to_sequence().to_ascii01(), "011");
        assert!(!c.parity());
        c.shift_in(true);
        assert_eq!(c.to_sequence().to_ascii01(), "111");
        assert!(c.parity());
    }
}
