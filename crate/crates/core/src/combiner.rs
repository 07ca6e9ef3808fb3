//! XOR combination of bit streams and the twice-two-faced construction.
//!
//! Given cuts `n_1 < n_2 < …` and component streams `X^1, X^2, …`, output bit
//! `w_i` is the XOR of `x^1_i … x^m_i` where `m = #{j : n_j < i} + 1`.
//! Component `c` is only read from position `n_{c−1} + 1` on, so it is
//! instantiated lazily when the output first reaches that position.
//!
//! # Configuration file
//!
//! ```text
//! # comments and blank lines are ignored
//! cut 2
//! cut 4
//! component order=2 pi=0.2 seed=1
//! component order=4 pi=0.2 seed=2
//! component order=8 pi=0.2 seed=3 variant=bar
//! ```
//!
//! `variant` is optional and defaults to `plain`. Component `i` must have order
//! `n_i` for every cut that exists; a trailing component past the last cut must
//! have a larger order and makes the stream unbounded.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitSequence;
use crate::error::{argument, Error, Result};
use crate::kernel::{KernelSpec, Variant};
use crate::process::{exact_block_distribution, BitStream, Generator, StateDistribution};
use crate::source::{BitSource, CounterSource};

pub fn xor_streams(a: &BitSequence, b: &BitSequence) -> Result<BitSequence> {
    if a.len() != b.len() {
        return Err(argument(format!(
            "cannot xor streams of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x ^ y).collect())
}

/// Exact law of `X ⊕ Y` for independent block laws indexed by word value:
/// `P(z) = Σ_v P_X(v) P_Y(v ⊕ z)`.
pub fn xor_convolve(px: &[f64], py: &[f64]) -> Result<Vec<f64>> {
    if px.len() != py.len() || !px.len().is_power_of_two() {
        return Err(argument(
            "xor convolution needs two laws over the same word length",
        ));
    }
    let n = px.len();
    let mut out = vec![0.0; n];
    for (v, &p) in px.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (w, &q) in py.iter().enumerate() {
            out[v ^ w] += p * q;
        }
    }
    Ok(out)
}

/// Strictly increasing positive cut points `n_1 < n_2 < …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSequence {
    cuts: Vec<usize>,
}

impl CutSequence {
    pub fn new(cuts: Vec<usize>) -> Result<Self> {
        if cuts.first() == Some(&0) {
            return Err(argument("cuts must be positive"));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(argument("cuts must be strictly increasing"));
        }
        Ok(Self { cuts })
    }

    /// `n_i = 2^i` for `i = 1..=count`.
    pub fn geometric(count: usize) -> Self {
        Self {
            cuts: (1..=count).map(|i| 1usize << i).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Components XOR-ed at 1-based position `i`.
    pub fn components_at(&self, position: usize) -> usize {
        self.cuts.partition_point(|&n| n < position) + 1
    }

    /// First 1-based position at which component `c` (1-based) is read.
    pub fn first_position(&self, component: usize) -> usize {
        if component <= 1 {
            1
        } else {
            self.cuts[component - 2] + 1
        }
    }
}

type StreamFactory = Box<dyn Fn() -> Result<Box<dyn BitStream>>>;

/// A lazily started component stream of a given order.
pub struct Component {
    order: usize,
    factory: StreamFactory,
}

impl Component {
    pub fn new(order: usize, factory: impl Fn() -> Result<Box<dyn BitStream>> + 'static) -> Self {
        Self {
            order,
            factory: Box::new(factory),
        }
    }

    /// `T(k, π)` or `T̄(k, π)` with uniform initial state, drawing from a
    /// counter source with the given seed.
    pub fn kernel(spec: KernelSpec, seed: u64) -> Self {
        Self::new(spec.order(), move || {
            Ok(Box::new(Generator::new(spec, CounterSource::new(seed))?) as Box<dyn BitStream>)
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Component")
            .field("order", &self.order)
            .finish()
    }
}

/// Streaming twice-two-faced process over a cut sequence.
#[derive(Debug)]
pub struct TwiceTwoFaced {
    cuts: CutSequence,
    components: Vec<Component>,
    active: Vec<Box<dyn BitStream>>,
    position: usize,
}

impl fmt::Debug for dyn BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BitStream")
    }
}

impl TwiceTwoFaced {
    pub fn new(components: Vec<Component>, cuts: CutSequence) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("at least one component is required".into()));
        }
        Ok(Self {
            cuts,
            components,
            active: Vec::new(),
            position: 0,
        })
    }

    /// Longest output the configured components can cover, `None` if unbounded.
    pub fn supported_len(&self) -> Option<usize> {
        let m = self.components.len();
        self.cuts.as_slice().get(m - 1).copied()
    }

    pub fn active_components(&self) -> usize {
        self.active.len()
    }

    pub fn position(&self) -> usize {
        self.position
    }
}

impl BitStream for TwiceTwoFaced {
    fn emit(&mut self) -> Result<bool> {
        let position = self.position + 1;
        let needed = self.cuts.components_at(position);
        while self.active.len() < needed {
            let index = self.active.len();
            let component = self.components.get(index).ok_or_else(|| {
                Error::Config(format!(
                    "position {position} needs {needed} components, only {} configured",
                    self.components.len()
                ))
            })?;
            let mut stream = (component.factory)()?;
            // Align with the absolute position: x^c_1 … x^c_{i−1} are never read.
            stream.skip(position - 1)?;
            self.active.push(stream);
        }
        let mut w = false;
        for stream in &mut self.active {
            w ^= stream.emit()?;
        }
        self.position = position;
        Ok(w)
    }
}

/// First `n` bits of the twice-two-faced process.
pub fn twice_two_faced(
    components: Vec<Component>,
    cuts: CutSequence,
    n: usize,
) -> Result<BitSequence> {
    let mut process = TwiceTwoFaced::new(components, cuts)?;
    if let Some(max) = process.supported_len() {
        if n > max {
            return Err(Error::Config(format!(
                "{n} bits requested but the components cover only {max}"
            )));
        }
    }
    process.take_bits(n)
}

/// Exact law of `w_1 … w_h` when every component is a kernel process started
/// from its uniform (stationary) state, by XOR-convolving the component path
/// laws restricted to the positions each component contributes to.
pub fn exact_twice_two_faced_law(
    kernels: &[KernelSpec],
    cuts: &CutSequence,
    horizon: usize,
) -> Result<Vec<f64>> {
    if horizon == 0 {
        return Err(argument("horizon must be at least 1"));
    }
    let needed = cuts.components_at(horizon);
    if kernels.len() < needed {
        return Err(Error::Config(format!(
            "horizon {horizon} needs {needed} components, {} given",
            kernels.len()
        )));
    }
    let full = (1usize << horizon) - 1;
    let mut law: Option<Vec<f64>> = None;
    for (c, kernel) in kernels.iter().take(needed).enumerate() {
        let first = cuts.first_position(c + 1);
        // Position p (1-based) is bit horizon − p of the word value.
        let keep = full >> (first - 1);
        let uniform = StateDistribution::uniform(kernel.order())?;
        let paths = exact_block_distribution(kernel, &uniform, 0, horizon)?;
        let mut masked = vec![0.0; paths.len()];
        for (w, &p) in paths.iter().enumerate() {
            masked[w & keep] += p;
        }
        law = Some(match law {
            None => masked,
            Some(acc) => xor_convolve(&acc, &masked)?,
        });
    }
    Ok(law.expect("at least one component"))
}

/// One component line of a configuration file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentSpec {
    pub kernel: KernelSpec,
    pub seed: u64,
}

/// Parsed twice-two-faced configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TwiceTwoFacedConfig {
    pub cuts: CutSequence,
    pub components: Vec<ComponentSpec>,
}

impl TwiceTwoFacedConfig {
    pub fn new(cuts: CutSequence, components: Vec<ComponentSpec>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("at least one component is required".into()));
        }
        for (i, c) in components.iter().enumerate() {
            match cuts.as_slice().get(i) {
                Some(&n) if c.kernel.order() != n => {
                    return Err(Error::Config(format!(
                        "component {} has order {}, its cut is {n}",
                        i + 1,
                        c.kernel.order()
                    )))
                }
                None if i > 0 && i == cuts.len() => {
                    let last = cuts.as_slice()[i - 1];
                    if c.kernel.order() <= last {
                        return Err(Error::Config(format!(
                            "trailing component order {} must exceed the last cut {last}",
                            c.kernel.order()
                        )));
                    }
                }
                None if i > cuts.len() => {
                    return Err(Error::Config(format!(
                        "{} components but only {} cuts: at most one trailing component",
                        components.len(),
                        cuts.len()
                    )))
                }
                _ => {}
            }
        }
        Ok(Self { cuts, components })
    }

    /// Cuts `2^i` with components `T(2^i, π)` until `2^c ≥ len`, plus one
    /// trailing component, so the first `len` bits are covered.
    pub fn geometric(len: usize, pi: f64, base_seed: u64) -> Result<Self> {
        let mut count = 1;
        while (1usize << count) < len {
            count += 1;
        }
        let cuts = CutSequence::geometric(count);
        let components = (1..=count + 1)
            .map(|i| {
                Ok(ComponentSpec {
                    kernel: KernelSpec::plain(1usize << i, pi)?,
                    seed: base_seed.wrapping_add(i as u64),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cuts, components)
    }

    pub fn build(&self) -> Result<TwiceTwoFaced> {
        let components = self
            .components
            .iter()
            .map(|c| Component::kernel(c.kernel, c.seed))
            .collect();
        TwiceTwoFaced::new(components, self.cuts.clone())
    }

    pub fn generate(&self, n: usize) -> Result<BitSequence> {
        twice_two_faced(
            self.components
                .iter()
                .map(|c| Component::kernel(c.kernel, c.seed))
                .collect(),
            self.cuts.clone(),
            n,
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in self.cuts.as_slice() {
            out.push_str(&format!("cut {n}\n"));
        }
        for c in &self.components {
            let variant = match c.kernel.variant() {
                Variant::Plain => "",
                Variant::Bar => " variant=bar",
            };
            out.push_str(&format!(
                "component order={} pi={} seed={}{variant}\n",
                c.kernel.order(),
                c.kernel.pi(),
                c.seed
            ));
        }
        out
    }
}

impl FromStr for TwiceTwoFacedConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cuts = Vec::new();
        let mut components = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let mut tokens = line.split_whitespace();
            match tokens.next() {
                Some("cut") => {
                    let n = tokens
                        .next()
                        .ok_or_else(|| err("cut needs a value".into()))?
                        .parse::<usize>()
                        .map_err(|e| err(format!("cut: {e}")))?;
                    if tokens.next().is_some() {
                        return Err(err("trailing tokens after cut".into()));
                    }
                    cuts.push(n);
                }
                Some("component") => {
                    let (mut order, mut pi, mut seed) = (None, None, None);
                    let mut variant = Variant::Plain;
                    for token in tokens {
                        let (key, value) = token
                            .split_once('=')
                            .ok_or_else(|| err(format!("expected key=value, got {token:?}")))?;
                        match key {
                            "order" => {
                                order = Some(
                                    value
                                        .parse::<usize>()
                                        .map_err(|e| err(format!("order: {e}")))?,
                                )
                            }
                            "pi" => {
                                pi = Some(
                                    value.parse::<f64>().map_err(|e| err(format!("pi: {e}")))?,
                                )
                            }
                            "seed" => {
                                seed = Some(
                                    value
                                        .parse::<u64>()
                                        .map_err(|e| err(format!("seed: {e}")))?,
                                )
                            }
                            "variant" => {
                                variant = match value {
                                    "plain" => Variant::Plain,
                                    "bar" => Variant::Bar,
                                    other => return Err(err(format!("unknown variant {other:?}"))),
                                }
                            }
                            other => return Err(err(format!("unknown key {other:?}"))),
                        }
                    }
                    let order = order.ok_or_else(|| err("component needs order=".into()))?;
                    let pi = pi.ok_or_else(|| err("component needs pi=".into()))?;
                    let seed = seed.ok_or_else(|| err("component needs seed=".into()))?;
                    let kernel =
                        KernelSpec::new(variant, order, pi).map_err(|e| err(e.to_string()))?;
                    components.push(ComponentSpec { kernel, seed });
                }
                Some(other) => return Err(err(format!("unknown directive {other:?}"))),
                None => {}
            }
        }
        Self::new(CutSequence::new(cuts)?, components)
    }
}

/// What to XOR onto a stream when whitening it.
#[derive(Debug, Clone, PartialEq)]
pub enum MaskSpec {
    Kernel(KernelSpec),
    TwiceTwoFaced(TwiceTwoFacedConfig),
}

/// XOR of `input` with a freshly generated mask of equal length. Kernel masks
/// draw their initial state and steps from `source`; twice-two-faced masks use
/// the seeds in their configuration.
pub fn whiten<S: BitSource + 'static>(
    input: &BitSequence,
    mask: &MaskSpec,
    source: S,
) -> Result<BitSequence> {
    let mut stream: Box<dyn BitStream> = match mask {
        MaskSpec::Kernel(spec) => Box::new(Generator::new(*spec, source)?),
        MaskSpec::TwiceTwoFaced(config) => Box::new(config.build()?),
    };
    whiten_with(input, &mut stream)
}

pub fn whiten_with<M: BitStream + ?Sized>(
    input: &BitSequence,
    mask: &mut M,
) -> Result<BitSequence> {
    input.iter().map(|x| Ok(x ^ mask.emit()?)).collect()
}
