//! LZ78 code-length estimator.

use std::collections::HashMap;

use crate::bits::BitString;
use crate::encoding::Context;

fn ceil_log2(j: u64) -> u64 {
    if j <= 1 {
        0
    } else {
        64 - (j - 1).leading_zeros() as u64
    }
}

struct Dictionary {
    children: HashMap<(usize, bool), usize>,
    nodes: usize,
    phrases: u64,
}

impl Dictionary {
    fn new() -> Self {
        Dictionary {
            children: HashMap::new(),
            nodes: 1,
            phrases: 0,
        }
    }

    /// Parses `bits` into phrases, returning the code length of the parse.
    /// A trailing partial phrase costs its index bits only, and only when
    /// `charge_partial` is set; otherwise it is dropped.
    fn parse(&mut self, bits: &[bool], charge_partial: bool) -> u64 {
        let mut cost = 0;
        let mut node = 0usize;
        for &b in bits {
            match self.children.get(&(node, b)) {
                Some(&next) => node = next,
                None => {
                    self.phrases += 1;
                    cost += ceil_log2(self.phrases) + 1;
                    self.children.insert((node, b), self.nodes);
                    self.nodes += 1;
                    node = 0;
                }
            }
        }
        if node != 0 && charge_partial {
            cost += ceil_log2(self.phrases + 1);
        }
        cost
    }
}

/// Deterministic dictionary-parse code length of `x` given `context`.
///
/// The canonical context encoding is parsed first for free, priming the
/// dictionary; phrase numbering continues into `x`. Phrase `j` costs
/// `ceil(log2 j) + 1` bits; a trailing partial phrase of `x` costs only its
/// index bits.
pub fn lz_estimate(x: &BitString, context: &Context) -> u64 {
    if x.is_empty() {
        return 0;
    }
    let mut dict = Dictionary::new();
    dict.parse(context.encode().bits(), false);
    dict.parse(x.bits(), true)
}
