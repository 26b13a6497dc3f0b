//! Finite binary strings.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A finite binary string. The empty string is permitted.
///
/// Strings are ordered by length first, then lexicographically, which is the
/// canonical order used for set listings and context encodings.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub const fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    /// The `width`-bit big-endian numeral of `value`.
    pub fn from_uint(value: u64, width: usize) -> Self {
        let bits = (0..width)
            .rev()
            .map(|i| i < 64 && (value >> i) & 1 == 1)
            .collect();
        BitString { bits }
    }

    /// Minimal binary numeral of `value`; zero maps to the empty string.
    pub fn binary_numeral(value: u64) -> Self {
        let width = (64 - value.leading_zeros()) as usize;
        Self::from_uint(value, width)
    }

    /// Interprets the string as a big-endian unsigned integer.
    /// Returns `None` when longer than 64 bits.
    pub fn to_uint(&self) -> Option<u64> {
        if self.bits.len() > 64 {
            return None;
        }
        Some(self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat(parts: &[&BitString]) -> BitString {
        let mut bits = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
        for p in parts {
            bits.extend_from_slice(&p.bits);
        }
        BitString { bits }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString {
            bits: self.bits[start..end].to_vec(),
        }
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        self.bits.starts_with(&prefix.bits)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Packs the bits into bytes, most significant bit first, padding the
    /// final byte with zeros.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect()
    }

    /// Expands bytes into bits, most significant bit first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let bits = bytes
            .iter()
            .flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1 == 1))
            .collect();
        BitString { bits }
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits
            .len()
            .cmp(&other.bits.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "invalid bit character {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString::from_bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and fixtures. Panics on non-binary input.
pub fn bs(s: &str) -> BitString {
    s.parse().expect("binary literal")
}
