//! Shared inputs for the search benchmarks.

use islab_core::{BitString, Budget, Context, Player};

/// Targets whose exact search cost spans a few orders of magnitude.
pub fn targets() -> Vec<(&'static str, BitString)> {
    ["", "0", "1", "01", "0000"]
        .into_iter()
        .map(|s| (s, s.parse().expect("bit string")))
        .collect()
}

pub fn budget(max_program_bits: u32) -> Budget {
    Budget::new(max_program_bits, 100).expect("budget")
}

/// Two overlapping players over 8 bits and a point in both.
pub fn overlapping_players() -> (Player, Player, BitString) {
    let a = Player::new(8, (0..64u64).map(|i| BitString::from_uint(i * 3, 8))).expect("A");
    let b = Player::new(8, (0..64u64).map(|i| BitString::from_uint(i * 2, 8))).expect("B");
    (a, b, BitString::from_uint(0, 8))
}

pub fn empty_context() -> Context {
    Context::empty()
}
