//! Empirical block statistics: overlapping occurrence counts, block
//! frequencies with deviation and chi-square summaries, and plug-in
//! conditional entropy.
//!
//! Frequencies are normalized by the number of windows `t − m + 1`.

use std::fmt::Write as _;
use std::thread;

use statrs::function::gamma::checked_gamma_ur;

use crate::bits::{word_index, BitSequence};
use crate::error::{argument, Error, Result};
use crate::process::conditional_entropy_of_law;

/// Largest block length with a full frequency table.
pub const BLOCK_TABLE_CAP: usize = 24;

/// Below this many bits counting stays on one thread.
const PARALLEL_THRESHOLD: usize = 1 << 20;

/// Overlapping occurrences of `word` in `seq`.
pub fn occurrence_count(seq: &BitSequence, word: &BitSequence) -> Result<u64> {
    if word.is_empty() {
        return Err(argument("word must be nonempty"));
    }
    if word.len() > seq.len() {
        return Err(argument(format!(
            "word of length {} is longer than the sequence ({})",
            word.len(),
            seq.len()
        )));
    }
    Ok(seq
        .as_slice()
        .windows(word.len())
        .filter(|w| *w == word.as_slice())
        .count() as u64)
}

fn check_block_len(seq: &BitSequence, m: usize) -> Result<()> {
    if m == 0 {
        return Err(argument("block length must be at least 1"));
    }
    if m > BLOCK_TABLE_CAP {
        return Err(Error::Capacity {
            what: "block length",
            requested: m,
            cap: BLOCK_TABLE_CAP,
        });
    }
    if m > seq.len() {
        return Err(argument(format!(
            "block length {m} exceeds sequence length {}",
            seq.len()
        )));
    }
    Ok(())
}

fn count_into(bits: &[bool], m: usize, counts: &mut [u64]) {
    let mask = (1u64 << m) - 1;
    let mut acc = word_index(&bits[..m - 1]);
    for &b in &bits[m - 1..] {
        acc = ((acc << 1) | b as u64) & mask;
        counts[acc as usize] += 1;
    }
}

/// Counts of every `m`-word over all overlapping windows, indexed by
/// big-endian word value.
pub fn block_counts(seq: &BitSequence, m: usize) -> Result<Vec<u64>> {
    check_block_len(seq, m)?;
    let bits = seq.as_slice();
    let mut counts = vec![0u64; 1usize << m];
    let workers = thread::available_parallelism().map_or(1, |n| n.get());
    if bits.len() < PARALLEL_THRESHOLD || workers < 2 {
        count_into(bits, m, &mut counts);
        return Ok(counts);
    }
    // Each chunk counts windows ending inside it; the m − 1 bits before the
    // chunk are prepended so windows straddling a boundary are seen once.
    let windows = bits.len() - m + 1;
    let per = windows.div_ceil(workers);
    let partials: Vec<Vec<u64>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let start = w * per;
                let end = ((w + 1) * per).min(windows);
                scope.spawn(move || {
                    let mut local = vec![0u64; 1usize << m];
                    if start < end {
                        count_into(&bits[start..end + m - 1], m, &mut local);
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("counting thread"))
            .collect()
    });
    for local in partials {
        for (c, l) in counts.iter_mut().zip(local) {
            *c += l;
        }
    }
    Ok(counts)
}

/// Block-frequency summary for one block length.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStats {
    pub block_len: usize,
    pub counts: Vec<u64>,
    pub windows: u64,
    pub max_abs_deviation: f64,
    pub chi_square: f64,
    pub df: u64,
    pub p_value: f64,
}

impl BlockStats {
    pub fn frequency(&self, word_index: usize) -> f64 {
        self.counts[word_index] as f64 / self.windows as f64
    }

    pub fn expected_count(&self) -> f64 {
        self.windows as f64 / self.counts.len() as f64
    }

    /// Whether the chi-square approximation is out of its usual range
    /// (expected count per cell below 5).
    pub fn sparse(&self) -> bool {
        self.expected_count() < 5.0
    }

    /// Largest `|freq(u) − 2^{−m}| · 2^m`.
    pub fn max_relative_deviation(&self) -> f64 {
        self.max_abs_deviation * self.counts.len() as f64
    }

    pub fn accepts_uniformity(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

pub fn block_frequencies(seq: &BitSequence, m: usize) -> Result<BlockStats> {
    let counts = block_counts(seq, m)?;
    Ok(summarize(m, counts))
}

fn summarize(m: usize, counts: Vec<u64>) -> BlockStats {
    let windows: u64 = counts.iter().sum();
    let cells = counts.len() as f64;
    let target = 1.0 / cells;
    let expected = windows as f64 / cells;
    let mut max_abs_deviation = 0.0f64;
    let mut chi_square = 0.0;
    for &c in &counts {
        max_abs_deviation = max_abs_deviation.max((c as f64 / windows as f64 - target).abs());
        chi_square += (c as f64 - expected).powi(2) / expected;
    }
    let df = counts.len() as u64 - 1;
    let p_value = chi_square_pvalue(chi_square, df).unwrap_or(f64::NAN);
    BlockStats {
        block_len: m,
        counts,
        windows,
        max_abs_deviation,
        chi_square,
        df,
        p_value,
    }
}

/// Block statistics for every length in `lengths`.
pub fn battery(
    seq: &BitSequence,
    lengths: impl IntoIterator<Item = usize>,
) -> Result<Vec<BlockStats>> {
    lengths
        .into_iter()
        .map(|m| block_frequencies(seq, m))
        .collect()
}

/// Upper tail `P(χ²_df ≥ statistic)`.
pub fn chi_square_pvalue(statistic: f64, df: u64) -> Result<f64> {
    if df == 0 {
        return Err(argument("chi-square needs at least one degree of freedom"));
    }
    if statistic.is_nan() || statistic < 0.0 {
        return Err(argument(format!(
            "chi-square statistic must be nonnegative, got {statistic}"
        )));
    }
    if statistic == 0.0 {
        return Ok(1.0);
    }
    checked_gamma_ur(df as f64 / 2.0, statistic / 2.0)
        .map_err(|e| argument(format!("incomplete gamma: {e}")))
}

/// Plug-in conditional entropy estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// Bits per letter.
    pub bits: f64,
    /// `(m−1)`-contexts that never occur; they contribute zero.
    pub unseen_contexts: usize,
}

/// Plug-in estimate of the order-`m` conditional entropy from the overlapping
/// `m`-block counts (`0 log 0 = 0`, log base 2).
pub fn empirical_conditional_entropy(seq: &BitSequence, m: usize) -> Result<EntropyEstimate> {
    let counts = block_counts(seq, m)?;
    let windows: u64 = counts.iter().sum();
    let law: Vec<f64> = counts.iter().map(|&c| c as f64 / windows as f64).collect();
    let unseen_contexts = counts.chunks_exact(2).filter(|p| p[0] + p[1] == 0).count();
    Ok(EntropyEstimate {
        bits: conditional_entropy_of_law(&law),
        unseen_contexts,
    })
}

pub const CSV_HEADER: &str = "block_len,windows,max_abs_deviation,chi_square,df,p_value";

pub fn report_csv(stats: &[BlockStats]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for s in stats {
        let _ = writeln!(
            out,
            "{},{},{:e},{:.6},{},{:e}",
            s.block_len, s.windows, s.max_abs_deviation, s.chi_square, s.df, s.p_value
        );
    }
    out
}

/// Line-oriented report with a verdict at significance `alpha`.
pub fn report_text(stats: &[BlockStats], alpha: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>3} {:>10} {:>12} {:>14} {:>8} {:>12}  verdict (alpha {alpha:e})",
        "m", "windows", "max|dev|", "chi2", "df", "p"
    );
    for s in stats {
        let verdict = if s.accepts_uniformity(alpha) {
            "uniform"
        } else {
            "REJECT"
        };
        let warn = if s.sparse() {
            "  (expected count < 5)"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "{:>3} {:>10} {:>12.4e} {:>14.3} {:>8} {:>12.4e}  {verdict}{warn}",
            s.block_len, s.windows, s.max_abs_deviation, s.chi_square, s.df, s.p_value
        );
    }
    out
}
