//! Two-faced processes: low-entropy binary Markov chains whose `k`-block
//! statistics are exactly uniform, the conversion that produces them from
//! Bernoulli input, XOR combiners, seed expansion, and the block-statistics
//! toolkit used to check them.

pub mod bits;
pub mod coder;
pub mod combiner;
pub mod error;
pub mod expander;
pub mod kernel;
pub mod process;
pub mod source;
pub mod stats;
pub mod transform;

pub use bits::{BitSequence, StreamFormat};
pub use combiner::{
    exact_twice_two_faced_law, twice_two_faced, whiten, whiten_with, xor_convolve, xor_streams,
    Component, ComponentSpec, CutSequence, MaskSpec, TwiceTwoFaced, TwiceTwoFacedConfig,
};
pub use error::{Error, Result};
pub use expander::{entropy_inverse, expand, Expander, ExpanderConfig};
pub use kernel::{
    cond_prob, cond_prob_recursive, kernel_table, Context, KernelSpec, KernelTable, Symbol, Variant,
};
pub use process::{
    binary_entropy, exact_block_distribution, exact_conditional_entropy, limit_entropy, BitStream,
    Generator, GeneratorState, StateDistribution,
};
pub use source::{BitSource, CounterSource, OsSource, ReplaySource, UniformSource};
pub use stats::{
    block_frequencies, chi_square_pvalue, empirical_conditional_entropy, occurrence_count,
    BlockStats,
};
pub use transform::{inverse_transform, m_select, transform, transform_variant, TransformState};
