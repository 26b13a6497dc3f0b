//! Exhaustive program-space searches over the reference machine.
//!
//! Programs are visited in a fixed total order (length, then the numeric
//! value of their bits). Each length is scanned in parallel on the current
//! rayon pool, and reductions pick the smallest index, so results never
//! depend on the partitioning or schedule.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use rayon::prelude::*;

use super::{Budget, ComplexityResult};
use crate::bits::BitString;
use crate::encoding::Context;
use crate::machine::{Decoded, OutputSink, Program, RunKind};
use crate::quantity::{LogSum, Quantity};

/// Stops a run as soon as its output stops being a prefix of the target,
/// or (with `stop_at_full`) as soon as the whole target has been printed.
struct TargetSink<'a> {
    target: &'a [bool],
    pos: usize,
    stop_at_full: bool,
    diverged: bool,
    completed_at: Option<u64>,
}

impl<'a> TargetSink<'a> {
    fn new(target: &'a [bool], stop_at_full: bool) -> Self {
        TargetSink {
            target,
            pos: 0,
            stop_at_full,
            diverged: false,
            completed_at: None,
        }
    }
}

impl OutputSink for TargetSink<'_> {
    fn emit(&mut self, bit: bool, step: u64) -> bool {
        if self.target.get(self.pos) != Some(&bit) {
            self.diverged = true;
            return false;
        }
        self.pos += 1;
        if self.pos == self.target.len() {
            self.completed_at = Some(step);
            if self.stop_at_full {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Verdict {
    /// Halted with exactly the target.
    Producer,
    /// Provably not a producer: failed, halted with other output, or printed
    /// a bit that breaks the target prefix.
    Resolved,
    /// Out of steps while its output was still a prefix of the target.
    Timeout,
}

fn judge_plain(index: u64, len: usize, target: &[bool], aux: &[bool], max_steps: u64) -> Verdict {
    let Some(decoded) = Decoded::from_index(index, len) else {
        return Verdict::Resolved;
    };
    let mut sink = TargetSink::new(target, false);
    let (kind, _) = decoded.execute(aux, max_steps, &mut sink);
    if sink.diverged {
        return Verdict::Resolved;
    }
    match kind {
        RunKind::Halted if sink.pos == target.len() => Verdict::Producer,
        RunKind::OutOfBudget => Verdict::Timeout,
        _ => Verdict::Resolved,
    }
}

fn lengths(budget: &Budget) -> impl Iterator<Item = usize> {
    0..=budget.max_program_bits() as usize
}

fn programs_of_len(len: usize) -> u64 {
    1u64 << len
}

/// Shortest program printing `x` and halting, with `context`'s canonical
/// encoding as auxiliary input.
///
/// The value is an upper bound on the machine complexity. `exact` holds
/// when every shorter candidate was resolved within the step budget; an
/// unfound target is exact when no candidate timed out, meaning its
/// complexity provably exceeds `L`.
pub fn plain_complexity(x: &BitString, context: &Context, budget: &Budget) -> ComplexityResult {
    let aux = context.encode();
    let target = x.bits();
    let aux = aux.bits();
    let t = budget.max_steps();
    let mut timeouts = 0u64;
    for len in lengths(budget) {
        let (best, timed_out) = (0..programs_of_len(len))
            .into_par_iter()
            .map(|i| match judge_plain(i, len, target, aux, t) {
                Verdict::Producer => (Some(i), 0u64),
                Verdict::Timeout => (None, 1),
                Verdict::Resolved => (None, 0),
            })
            .reduce(
                || (None, 0),
                |a, b| {
                    let best = match (a.0, b.0) {
                        (Some(x), Some(y)) => Some(x.min(y)),
                        (x, y) => x.or(y),
                    };
                    (best, a.1 + b.1)
                },
            );
        if let Some(index) = best {
            return ComplexityResult {
                value: Quantity::int(len as i64),
                exact: timeouts == 0,
                witness: Some(Program::from_index(index, len)),
            };
        }
        timeouts += timed_out;
    }
    ComplexityResult {
        value: Quantity::Infinite,
        exact: timeouts == 0,
        witness: None,
    }
}

/// Levin complexity: minimises `l(p) + log2(max(1, t))` where `t` is the
/// first step at which the output equals `x` (halting not required).
///
/// Dovetailed in phases: phase `i` gives every program of length `ℓ ≤ i`
/// up to `2^(i-ℓ)` steps (capped at `T`). The first phase that finds any
/// candidate has found an optimum, because everything still unexplored
/// scores above `i`. Programs that died or diverged are not rerun.
pub fn levin_complexity(x: &BitString, context: &Context, budget: &Budget) -> ComplexityResult {
    let aux = context.encode();
    let target = x.bits();
    let aux = aux.bits();
    let max_len = budget.max_program_bits() as usize;
    let t_max = budget.max_steps();
    let t_bits = 64 - (t_max - 1).leading_zeros() as usize; // ceil(log2 T)
    let mut dead: Vec<Vec<bool>> = (0..=max_len)
        .map(|len| vec![false; programs_of_len(len) as usize])
        .collect();

    for phase in 0..=(max_len + t_bits) {
        // (score key = 2^len * t, len, index, t)
        let mut best: Option<(u128, usize, u64, u64)> = None;
        for (len, dead_len) in dead.iter_mut().enumerate().take(max_len.min(phase) + 1) {
            let shift = phase - len;
            let cap = if shift >= 63 { t_max } else { t_max.min(1u64 << shift) };
            let results: Vec<(u64, Option<u64>, bool)> = (0..programs_of_len(len))
                .into_par_iter()
                .filter(|&i| !dead_len[i as usize])
                .filter_map(|i| {
                    if target.is_empty() {
                        return Some((i, Some(0), false));
                    }
                    let Some(decoded) = Decoded::from_index(i, len) else {
                        return Some((i, None, true));
                    };
                    let mut sink = TargetSink::new(target, true);
                    let (kind, _) = decoded.execute(aux, cap, &mut sink);
                    match sink.completed_at {
                        Some(t) => Some((i, Some(t), false)),
                        None if sink.diverged || kind != RunKind::OutOfBudget => {
                            Some((i, None, true))
                        }
                        None => None,
                    }
                })
                .collect();
            for (i, found, died) in results {
                if died {
                    dead_len[i as usize] = true;
                }
                if let Some(t) = found {
                    let key = (t.max(1) as u128) << len;
                    let cand = (key, len, i, t);
                    if best.is_none_or(|b| (cand.0, cand.1, cand.2) < (b.0, b.1, b.2)) {
                        best = Some(cand);
                    }
                }
            }
        }
        if let Some((key, len, index, t)) = best {
            let value = LogSum::int(len as i64) + LogSum::log2(t.max(1));
            // exact iff best ≤ log2 T and best ≤ L
            let exact = key <= t_max as u128 && key <= (1u128 << max_len);
            return ComplexityResult {
                value: Quantity::Finite(value),
                exact,
                witness: Some(Program::from_index(index, len)),
            };
        }
    }
    ComplexityResult {
        value: Quantity::Infinite,
        exact: false,
        witness: None,
    }
}

/// Bounded algorithmic mass: `Σ 2^{-l(p)}` over programs of length `≤ L`
/// that halt with output `x` within `T` steps.
pub fn algorithmic_mass(x: &BitString, budget: &Budget) -> BigRational {
    let target = x.bits();
    let t = budget.max_steps();
    let mut total = BigRational::zero();
    for len in lengths(budget) {
        let count = (0..programs_of_len(len))
            .into_par_iter()
            .filter(|&i| judge_plain(i, len, target, &[], t) == Verdict::Producer)
            .count();
        if count > 0 {
            total += BigRational::new(BigInt::from(count), BigInt::one() << len);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use crate::machine::run;

    fn budget(l: u32, t: u64) -> Budget {
        Budget::new(l, t).unwrap()
    }

    /// Independent oracle: full `run` on every program, no pruning.
    fn brute_plain(x: &BitString, aux: &BitString, b: &Budget) -> Option<(usize, Program)> {
        for len in 0..=b.max_program_bits() as usize {
            for i in 0..(1u64 << len) {
                let p = Program::from_index(i, len);
                if run(&p, aux, b.max_steps()).halted_with(x) {
                    return Some((len, p));
                }
            }
        }
        None
    }

    #[test]
    fn pruned_search_agrees_with_brute_force() {
        let b = budget(12, 60);
        for target in ["", "0", "1", "00", "01", "10", "11", "000"] {
            let x = bs(target);
            for ctx in [Context::empty(), Context::single(bs("1")), Context::single(bs("0110"))] {
                let got = plain_complexity(&x, &ctx, &b);
                let want = brute_plain(&x, &ctx.encode(), &b);
                match want {
                    Some((len, p)) => {
                        assert_eq!(got.value, Quantity::int(len as i64), "target {target}");
                        assert_eq!(got.witness, Some(p));
                    }
                    None => assert_eq!(got.value, Quantity::Infinite),
                }
            }
        }
    }

    #[test]
    fn timeouts_clear_exactness() {
        // at length 9, "~[]" spins forever, so "00" (which needs 9 bits)
        // cannot be certified with a small step budget
        let r = plain_complexity(&bs("11"), &Context::empty(), &budget(12, 5));
        assert!(!r.exact);
        let r = plain_complexity(&bs("11"), &Context::empty(), &budget(8, 5));
        assert_eq!(r.value, Quantity::Infinite);
        assert!(r.exact);
    }

    #[test]
    fn levin_of_empty_is_zero() {
        let r = levin_complexity(&bs(""), &Context::empty(), &budget(6, 16));
        assert_eq!(r.value, Quantity::int(0));
        assert_eq!(r.witness, Some(Program::default()));
        assert!(r.exact);
    }

    #[test]
    fn levin_unfound_is_infinite() {
        let r = levin_complexity(&bs("1111"), &Context::empty(), &budget(6, 16));
        assert_eq!(r.value, Quantity::Infinite);
        assert!(!r.exact);
    }

    #[test]
    fn mass_of_unreachable_is_zero() {
        assert!(algorithmic_mass(&bs("0"), &budget(5, 100)).is_zero());
    }
}
