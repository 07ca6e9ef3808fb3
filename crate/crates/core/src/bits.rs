//! Finite binary sequences and their three stream encodings.
//!
//! * `ascii01`: one `'0'`/`'1'` character per bit. Whitespace is ignored on input.
//! * `packed`: 8 bits per byte, the first bit in the least-significant position,
//!   final partial byte zero-padded. The bit length travels out of band.
//! * `hex`: the packed bytes, hex-encoded lowercase.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Ordered finite sequence of bits.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSequence {
    bits: Vec<bool>,
}

impl BitSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            bits: Vec::with_capacity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn into_vec(self) -> Vec<bool> {
        self.bits
    }

    pub fn extend_from(&mut self, other: &BitSequence) {
        self.bits.extend_from_slice(&other.bits);
    }

    /// Sub-sequence `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitSequence {
        BitSequence::from(&self.bits[start..end])
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Parses `'0'`/`'1'` characters, skipping ASCII whitespace.
    pub fn from_ascii01(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for (pos, c) in text.char_indices() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_ascii_whitespace() => {}
                c => {
                    return Err(Error::Parse(format!(
                        "unexpected character {c:?} at byte {pos} in ascii01 input"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }

    pub fn to_ascii01(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    /// Packs 8 bits per byte, first bit in the least-significant position.
    pub fn to_packed(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << i))
            })
            .collect()
    }

    /// Unpacks `bytes`. With `len = None` every bit of every byte is taken.
    pub fn from_packed(bytes: &[u8], len: Option<usize>) -> Result<Self> {
        let available = bytes.len() * 8;
        let len = len.unwrap_or(available);
        if len > available {
            return Err(Error::Parse(format!(
                "packed input holds {available} bits, {len} requested"
            )));
        }
        let bits = (0..len)
            .map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1)
            .collect();
        Ok(Self { bits })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_packed())
    }

    pub fn from_hex(text: &str, len: Option<usize>) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_ascii_whitespace()).collect();
        let bytes = hex::decode(cleaned).map_err(|e| Error::Parse(format!("hex: {e}")))?;
        Self::from_packed(&bytes, len)
    }

    /// Big-endian integer value of the word: first bit is most significant.
    /// Only meaningful for sequences of at most 64 bits.
    pub fn to_index(&self) -> u64 {
        word_index(&self.bits)
    }

    /// The `len`-bit word whose big-endian value is `index`.
    pub fn from_index(index: u64, len: usize) -> Self {
        let bits = (0..len)
            .map(|i| (index >> (len - 1 - i)) & 1 == 1)
            .collect();
        Self { bits }
    }

    pub fn encode(&self, format: StreamFormat) -> Vec<u8> {
        match format {
            StreamFormat::Ascii01 => self.to_ascii01().into_bytes(),
            StreamFormat::Packed => self.to_packed(),
            StreamFormat::Hex => self.to_hex().into_bytes(),
        }
    }

    pub fn decode(data: &[u8], format: StreamFormat, len: Option<usize>) -> Result<Self> {
        let text =
            || std::str::from_utf8(data).map_err(|e| Error::Parse(format!("not utf-8 text: {e}")));
        let seq = match format {
            StreamFormat::Ascii01 => Self::from_ascii01(text()?)?,
            StreamFormat::Packed => return Self::from_packed(data, len),
            StreamFormat::Hex => return Self::from_hex(text()?, len),
        };
        match len {
            Some(n) if n > seq.len() => Err(Error::Parse(format!(
                "input holds {} bits, {n} requested",
                seq.len()
            ))),
            Some(n) => Ok(seq.slice(0, n)),
            None => Ok(seq),
        }
    }
}

pub(crate) fn word_index(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence({})", self.to_ascii01())
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii01())
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_ascii01(s)
    }
}

impl From<Vec<bool>> for BitSequence {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

impl From<&[bool]> for BitSequence {
    fn from(bits: &[bool]) -> Self {
        Self {
            bits: bits.to_vec(),
        }
    }
}

impl FromIterator<bool> for BitSequence {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

impl std::ops::Index<usize> for BitSequence {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.bits[i]
    }
}

/// Wire encoding of a bit stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StreamFormat {
    #[default]
    Ascii01,
    Packed,
    Hex,
}

impl FromStr for StreamFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii01" => Ok(Self::Ascii01),
            "packed" => Ok(Self::Packed),
            "hex" => Ok(Self::Hex),
            other => Err(Error::Parse(format!("unknown stream format {other:?}"))),
        }
    }
}

impl fmt::Display for StreamFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ascii01 => "ascii01",
            Self::Packed => "packed",
            Self::Hex => "hex",
        })
    }
}
