//! Pairing function and canonical set listings.

use std::collections::BTreeSet;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// `1^{l(b)} 0 b x y`, where `b` is the minimal binary numeral of `l(x)`.
///
/// The output length is `l(y) + l(x) + 2 l(b) + 1`.
pub fn encode_pair(x: &BitString, y: &BitString) -> BitString {
    let b = BitString::binary_numeral(x.len() as u64);
    let mut out = BitString::empty();
    for _ in 0..b.len() {
        out.push(true);
    }
    out.push(false);
    out.extend_from(&b);
    out.extend_from(x);
    out.extend_from(y);
    out
}

/// Splits a pair header off the front of `code`, returning `(x, rest)`.
fn split_pair(code: &BitString) -> Result<(BitString, BitString)> {
    let bits = code.bits();
    let header = bits.iter().take_while(|&&b| b).count();
    if header >= bits.len() {
        return Err(Error::Parse("pair header has no terminating 0".into()));
    }
    if header > 64 {
        return Err(Error::Parse("pair length field too wide".into()));
    }
    let num_start = header + 1;
    let num_end = num_start + header;
    if num_end > bits.len() {
        return Err(Error::Parse("pair length field truncated".into()));
    }
    let numeral = code.slice(num_start, num_end);
    if header > 0 && !numeral.bits()[0] {
        return Err(Error::Parse("pair length numeral is not minimal".into()));
    }
    let x_len = numeral.to_uint().unwrap_or(0) as usize;
    let x_end = num_end
        .checked_add(x_len)
        .filter(|&e| e <= bits.len())
        .ok_or_else(|| Error::Parse("pair payload truncated".into()))?;
    Ok((code.slice(num_end, x_end), code.slice(x_end, bits.len())))
}

pub fn decode_pair(code: &BitString) -> Result<(BitString, BitString)> {
    split_pair(code)
}

/// Canonical listing of a finite set: members sorted by (length, lex) and
/// right-nested with [`encode_pair`]. `{x}` encodes as `x`, `∅` as `ε`.
pub fn encode_set<'a, I>(members: I) -> BitString
where
    I: IntoIterator<Item = &'a BitString>,
{
    let sorted: BTreeSet<&BitString> = members.into_iter().collect();
    encode_sorted(&sorted.into_iter().collect::<Vec<_>>())
}

fn encode_sorted(sorted: &[&BitString]) -> BitString {
    match sorted {
        [] => BitString::empty(),
        [only] => (*only).clone(),
        [init @ .., last] => {
            let mut acc = (*last).clone();
            for x in init.iter().rev() {
                acc = encode_pair(x, &acc);
            }
            acc
        }
    }
}

/// Inverse of [`encode_set`] given the number of members.
pub fn decode_set(code: &BitString, count: usize) -> Result<Vec<BitString>> {
    match count {
        0 if code.is_empty() => Ok(Vec::new()),
        0 => Err(Error::Parse("nonempty code for empty set".into())),
        _ => {
            let mut out = Vec::with_capacity(count);
            let mut rest = code.clone();
            for _ in 1..count {
                let (x, tail) = split_pair(&rest)?;
                out.push(x);
                rest = tail;
            }
            out.push(rest);
            Ok(out)
        }
    }
}

/// An unordered, deduplicated conditioning context.
///
/// Its encoding is the canonical set listing of its members, so conditioning
/// on `{a, b}` and `{b, a}` is the same query.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    members: Vec<BitString>,
}

impl Context {
    pub fn empty() -> Self {
        Context::default()
    }

    pub fn new<I: IntoIterator<Item = BitString>>(members: I) -> Self {
        let set: BTreeSet<BitString> = members.into_iter().collect();
        Context {
            members: set.into_iter().collect(),
        }
    }

    pub fn single(x: BitString) -> Self {
        Context { members: vec![x] }
    }

    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn encode(&self) -> BitString {
        encode_sorted(&self.members.iter().collect::<Vec<_>>())
    }
}
