//! Resource-bounded complexity over the reference machine.
//!
//! Every information measure in the workbench is parameterised by a
//! [`ComplexityModel`]: a deterministic functional from a target string and an
//! unordered conditioning context to a code length in bits.

pub mod cache;
mod lz;
mod search;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cache::{Cache, CacheKey, SearchKind};
pub use lz::lz_estimate;
pub use search::{algorithmic_mass, levin_complexity, plain_complexity};

use crate::bits::BitString;
use crate::encoding::Context;
use crate::error::{Error, Result};
use crate::machine::{run, Program};
use crate::quantity::Quantity;

/// Largest program length an exhaustive search will accept.
pub const MAX_PROGRAM_BITS: u32 = 28;

/// Search budget: program lengths `0..=L`, at most `T` steps per run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Budget {
    max_program_bits: u32,
    max_steps: u64,
}

impl Budget {
    pub fn new(max_program_bits: u32, max_steps: u64) -> Result<Self> {
        if max_steps == 0 {
            return Err(Error::Precondition("max_steps must be at least 1".into()));
        }
        if max_program_bits > MAX_PROGRAM_BITS {
            return Err(Error::ScaleLimit(format!(
                "max_program_bits {max_program_bits} exceeds {MAX_PROGRAM_BITS}"
            )));
        }
        Ok(Budget {
            max_program_bits,
            max_steps,
        })
    }

    pub fn max_program_bits(&self) -> u32 {
        self.max_program_bits
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_program_bits: 20,
            max_steps: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityResult {
    /// Bits, or `Infinite` when nothing was found within budget.
    pub value: Quantity,
    pub exact: bool,
    pub witness: Option<Program>,
}

/// Upper bound from a hand-written program: `l(p)` if `p` halts with `x`
/// on the context encoding within `max_steps`, otherwise `∞`.
pub fn witness_bound(
    program: &Program,
    x: &BitString,
    context: &Context,
    max_steps: u64,
) -> Result<ComplexityResult> {
    if !program.is_valid() {
        return Err(Error::InvalidProgram(format!(
            "{program}: unbalanced brackets"
        )));
    }
    let out = run(program, &context.encode(), max_steps);
    Ok(if out.halted_with(x) {
        ComplexityResult {
            value: Quantity::int(program.len() as i64),
            exact: false,
            witness: Some(program.clone()),
        }
    } else {
        ComplexityResult {
            value: Quantity::Infinite,
            exact: false,
            witness: None,
        }
    })
}

/// A named complexity functional.
pub trait ComplexityModel: Send + Sync {
    fn name(&self) -> String;

    /// Code length of `target` given `context`; `Infinite` when unbounded.
    fn complexity(&self, target: &BitString, context: &Context) -> Quantity;

    /// The model's own Levin-style time-bounded reading of `target`, when it
    /// has one. Used for context in theorem reports.
    fn levin(&self, _target: &BitString) -> Option<Quantity> {
        None
    }
}

/// Exhaustive plain complexity under a fixed budget.
#[derive(Clone, Debug)]
pub struct ExactBounded {
    pub budget: Budget,
    cache: Arc<Cache>,
}

impl ExactBounded {
    pub fn new(budget: Budget) -> Self {
        Self::with_cache(budget, Arc::new(Cache::in_memory()))
    }

    pub fn with_cache(budget: Budget, cache: Arc<Cache>) -> Self {
        ExactBounded { budget, cache }
    }

    pub fn search(&self, target: &BitString, context: &Context) -> ComplexityResult {
        let key = CacheKey::new(SearchKind::Plain, target, &context.encode(), &self.budget);
        self.cache
            .get_or_compute(key, || plain_complexity(target, context, &self.budget))
    }
}

impl ComplexityModel for ExactBounded {
    fn name(&self) -> String {
        format!(
            "exact(L={},T={})",
            self.budget.max_program_bits, self.budget.max_steps
        )
    }

    fn complexity(&self, target: &BitString, context: &Context) -> Quantity {
        self.search(target, context).value
    }

    fn levin(&self, target: &BitString) -> Option<Quantity> {
        let key = CacheKey::new(SearchKind::Levin, target, &BitString::empty(), &self.budget);
        let r = self.cache.get_or_compute(key, || {
            levin_complexity(target, &Context::empty(), &self.budget)
        });
        Some(r.value)
    }
}

/// Levin complexity under a fixed budget.
#[derive(Clone, Debug)]
pub struct LevinBounded {
    pub budget: Budget,
    cache: Arc<Cache>,
}

impl LevinBounded {
    pub fn new(budget: Budget) -> Self {
        Self::with_cache(budget, Arc::new(Cache::in_memory()))
    }

    pub fn with_cache(budget: Budget, cache: Arc<Cache>) -> Self {
        LevinBounded { budget, cache }
    }

    pub fn search(&self, target: &BitString, context: &Context) -> ComplexityResult {
        let key = CacheKey::new(SearchKind::Levin, target, &context.encode(), &self.budget);
        self.cache
            .get_or_compute(key, || levin_complexity(target, context, &self.budget))
    }
}

impl ComplexityModel for LevinBounded {
    fn name(&self) -> String {
        format!(
            "levin(L={},T={})",
            self.budget.max_program_bits, self.budget.max_steps
        )
    }

    fn complexity(&self, target: &BitString, context: &Context) -> Quantity {
        self.search(target, context).value
    }

    fn levin(&self, target: &BitString) -> Option<Quantity> {
        Some(self.complexity(target, &Context::empty()))
    }
}

/// The LZ78 dictionary estimator; always finite.
#[derive(Clone, Copy, Debug, Default)]
pub struct Lz78Estimator;

impl ComplexityModel for Lz78Estimator {
    fn name(&self) -> String {
        "lz78".into()
    }

    fn complexity(&self, target: &BitString, context: &Context) -> Quantity {
        Quantity::int(lz_estimate(target, context) as i64)
    }
}

/// Best of a fixed table of hand-written programs.
#[derive(Clone, Debug)]
pub struct WitnessTable {
    programs: Vec<Program>,
    max_steps: u64,
}

impl WitnessTable {
    pub fn new(programs: Vec<Program>, max_steps: u64) -> Result<Self> {
        if let Some(bad) = programs.iter().find(|p| !p.is_valid()) {
            return Err(Error::InvalidProgram(format!("{bad}: unbalanced brackets")));
        }
        Ok(WitnessTable {
            programs,
            max_steps,
        })
    }

    pub fn best(&self, target: &BitString, context: &Context) -> ComplexityResult {
        self.programs
            .iter()
            .filter_map(|p| witness_bound(p, target, context, self.max_steps).ok())
            .filter(|r| r.value.is_finite())
            .min_by(|a, b| {
                a.value
                    .min_cmp(&b.value)
                    .then_with(|| a.witness.cmp(&b.witness))
            })
            .unwrap_or(ComplexityResult {
                value: Quantity::Infinite,
                exact: false,
                witness: None,
            })
    }
}

impl ComplexityModel for WitnessTable {
    fn name(&self) -> String {
        format!("witness_table(n={},T={})", self.programs.len(), self.max_steps)
    }

    fn complexity(&self, target: &BitString, context: &Context) -> Quantity {
        self.best(target, context).value
    }
}
