//! The cybernetic agent model.
//!
//! An agent (a deterministic [`Policy`]) and an [`Environment`] alternate for
//! `m` cycles: the agent emits action `y_k` from the perceptions seen so far,
//! the environment answers with perception `x_k` drawn from a chronological
//! conditional `μ(x_k | yx_{<k} y_k)`. Each perception carries a reward.
//! All probability arithmetic is exact.

mod io;
mod value;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num::rational::BigRational;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

pub use io::{EnvironmentFile, PolicyFile, TableRows};
pub use value::{
    agent_set, env_set_b, env_set_d, interacts_at, optimal_policy, optimal_value, value,
    SetVariant,
};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// A finite alphabet of `size` symbols coded in `width` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alphabet {
    pub size: usize,
    pub width: usize,
}

impl Alphabet {
    pub fn new(size: usize, width: usize) -> Result<Self> {
        if size == 0 || width >= 32 || size > 1usize << width {
            return Err(Error::InvalidEnvironment(format!(
                "alphabet of {size} symbols does not fit in {width} bits"
            )));
        }
        Ok(Alphabet { size, width })
    }

    pub fn binary() -> Self {
        Alphabet { size: 2, width: 1 }
    }
}

/// One action-perception cycle `(y_k, x_k)`.
pub type Cycle = (usize, usize);

/// Alphabets and reward map shared by agents and environments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub actions: Alphabet,
    pub perceptions: Alphabet,
    /// reward of each perception symbol
    pub rewards: Vec<u32>,
    pub reward_bound: u32,
}

impl Signature {
    pub fn new(
        actions: Alphabet,
        perceptions: Alphabet,
        rewards: Vec<u32>,
        reward_bound: u32,
    ) -> Result<Self> {
        if rewards.len() != perceptions.size {
            return Err(Error::InvalidEnvironment(format!(
                "{} rewards for {} perceptions",
                rewards.len(),
                perceptions.size
            )));
        }
        if let Some(r) = rewards.iter().find(|&&r| r > reward_bound) {
            return Err(Error::InvalidEnvironment(format!(
                "reward {r} exceeds bound {reward_bound}"
            )));
        }
        Ok(Signature {
            actions,
            perceptions,
            rewards,
            reward_bound,
        })
    }

    /// 1-bit actions and perceptions, reward = perception bit.
    pub fn binary() -> Self {
        Signature {
            actions: Alphabet::binary(),
            perceptions: Alphabet::binary(),
            rewards: vec![0, 1],
            reward_bound: 1,
        }
    }

    pub fn reward(&self, x: usize) -> u32 {
        self.rewards[x]
    }

    /// `r(x_{1:k}) = Σ r(x_i)`
    pub fn total_reward(&self, history: &[Cycle]) -> u64 {
        history.iter().map(|&(_, x)| self.rewards[x] as u64).sum()
    }

    pub fn codec(&self, horizon: usize) -> HistoryCodec {
        HistoryCodec {
            action_width: self.actions.width,
            perception_width: self.perceptions.width,
            horizon,
        }
    }

    pub fn check_compatible(&self, other: &Signature) -> Result<()> {
        if self.actions != other.actions || self.perceptions != other.perceptions {
            return Err(Error::AlphabetMismatch(format!(
                "{:?}/{:?} vs {:?}/{:?}",
                self.actions, self.perceptions, other.actions, other.perceptions
            )));
        }
        Ok(())
    }
}

/// A chronological (semi)measure over perception sequences.
pub trait Environment: Send + Sync {
    fn name(&self) -> &str;

    fn signature(&self) -> &Signature;

    /// `μ(x | history, action)` for every perception `x`.
    fn conditional(&self, history: &[Cycle], action: usize) -> Vec<BigRational>;

    /// Joint probability `μ(yx_{1:k})` of a complete history.
    fn joint(&self, history: &[Cycle]) -> BigRational {
        let mut p = BigRational::one();
        for k in 0..history.len() {
            let (y, x) = history[k];
            let cond = self.conditional(&history[..k], y);
            p *= &cond[x];
            if p.is_zero() {
                break;
            }
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// `rows[y][x]`: the perception depends only on the current action.
    Memoryless(Vec<Vec<BigRational>>),
    /// Keyed by the flattened `y1 x1 … y_k`; absent rows carry no mass.
    History(BTreeMap<Vec<usize>, Vec<BigRational>>),
}

/// Environment given by explicit conditional tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEnvironment {
    name: String,
    signature: Signature,
    kernel: Kernel,
}

impl TableEnvironment {
    /// Validates the chronological shape and the semimeasure condition
    /// (every row sums to at most 1).
    pub fn new(name: impl Into<String>, signature: Signature, kernel: Kernel) -> Result<Self> {
        let nx = signature.perceptions.size;
        let ny = signature.actions.size;
        let check_row = |row: &[BigRational], at: &str| -> Result<()> {
            if row.len() != nx {
                return Err(Error::InvalidEnvironment(format!(
                    "row {at} has {} entries, expected {nx}",
                    row.len()
                )));
            }
            if row.iter().any(|p| p < &BigRational::zero() || p > &BigRational::one()) {
                return Err(Error::InvalidEnvironment(format!("row {at} has a value outside [0,1]")));
            }
            let sum: BigRational = row.iter().sum();
            if sum > BigRational::one() {
                return Err(Error::InvalidEnvironment(format!("row {at} sums to {sum} > 1")));
            }
            Ok(())
        };
        match &kernel {
            Kernel::Memoryless(rows) => {
                if rows.len() != ny {
                    return Err(Error::InvalidEnvironment(format!(
                        "{} memoryless rows for {ny} actions",
                        rows.len()
                    )));
                }
                for (y, row) in rows.iter().enumerate() {
                    check_row(row, &y.to_string())?;
                }
            }
            Kernel::History(rows) => {
                for (key, row) in rows {
                    if key.len() % 2 == 0 {
                        return Err(Error::InvalidEnvironment(format!(
                            "row {key:?} is not chronological: keys are y1 x1 … y_k"
                        )));
                    }
                    let in_range = key.iter().enumerate().all(|(i, &s)| {
                        if i % 2 == 0 { s < ny } else { s < nx }
                    });
                    if !in_range {
                        return Err(Error::InvalidEnvironment(format!("row {key:?} has symbols out of range")));
                    }
                    check_row(row, &format!("{key:?}"))?;
                }
            }
        }
        Ok(TableEnvironment {
            name: name.into(),
            signature,
            kernel,
        })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Checks every row reachable within `horizon` cycles sums to exactly 1.
    pub fn check_proper(&self, horizon: usize) -> Result<()> {
        check_proper(self, horizon)
    }
}

impl Environment for TableEnvironment {
    fn name(&self) -> &str {
        &self.name
    }

    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn conditional(&self, history: &[Cycle], action: usize) -> Vec<BigRational> {
        let nx = self.signature.perceptions.size;
        match &self.kernel {
            Kernel::Memoryless(rows) => rows
                .get(action)
                .cloned()
                .unwrap_or_else(|| vec![BigRational::zero(); nx]),
            Kernel::History(rows) => {
                let mut key: Vec<usize> = history.iter().flat_map(|&(y, x)| [y, x]).collect();
                key.push(action);
                rows.get(&key)
                    .cloned()
                    .unwrap_or_else(|| vec![BigRational::zero(); nx])
            }
        }
    }
}

/// Verifies conditionals sum to exactly 1 on every history with positive
/// probability up to `horizon` cycles.
pub fn check_proper(env: &dyn Environment, horizon: usize) -> Result<()> {
    fn walk(env: &dyn Environment, h: &mut Vec<Cycle>, horizon: usize) -> Result<()> {
        if h.len() == horizon {
            return Ok(());
        }
        let sig = env.signature();
        for y in 0..sig.actions.size {
            let row = env.conditional(h, y);
            let sum: BigRational = row.iter().sum();
            if !sum.is_one() {
                return Err(Error::InvalidEnvironment(format!(
                    "{}: conditional after {h:?} with action {y} sums to {sum}",
                    env.name()
                )));
            }
            for (x, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    h.push((y, x));
                    walk(env, h, horizon)?;
                    h.pop();
                }
            }
        }
        Ok(())
    }
    walk(env, &mut Vec::new(), horizon)
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `x_k := y_k`, reward = perception bit.
pub fn echo() -> TableEnvironment {
    TableEnvironment::new(
        "echo",
        Signature::binary(),
        Kernel::Memoryless(vec![vec![q(1), q(0)], vec![q(0), q(1)]]),
    )
    .expect("echo")
}

/// `x_k := NOT y_k`, reward = perception bit.
pub fn anti() -> TableEnvironment {
    TableEnvironment::new(
        "anti",
        Signature::binary(),
        Kernel::Memoryless(vec![vec![q(0), q(1)], vec![q(1), q(0)]]),
    )
    .expect("anti")
}

/// Uniform perception bit regardless of action, reward = perception bit.
pub fn fair_coin() -> TableEnvironment {
    let half = BigRational::new(1.into(), 2.into());
    TableEnvironment::new(
        "fair_coin",
        Signature::binary(),
        Kernel::Memoryless(vec![vec![half.clone(), half.clone()], vec![half.clone(), half]]),
    )
    .expect("fair coin")
}

pub fn builtin(name: &str) -> Option<TableEnvironment> {
    match name {
        "echo" => Some(echo()),
        "anti" => Some(anti()),
        "fair_coin" => Some(fair_coin()),
        _ => None,
    }
}

/// A deterministic policy: perception history `x_{<k}` → action `y_k`,
/// total on every history shorter than the horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    actions: Alphabet,
    perceptions: Alphabet,
    horizon: usize,
    decisions: HashMap<Vec<usize>, usize>,
}

impl Policy {
    pub fn new(
        actions: Alphabet,
        perceptions: Alphabet,
        horizon: usize,
        decisions: HashMap<Vec<usize>, usize>,
    ) -> Result<Self> {
        let policy = Policy {
            actions,
            perceptions,
            horizon,
            decisions,
        };
        policy.check_total()?;
        Ok(policy)
    }

    pub fn from_fn(
        actions: Alphabet,
        perceptions: Alphabet,
        horizon: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let decisions = perception_histories(perceptions.size, horizon)
            .into_iter()
            .map(|h| {
                let a = f(&h);
                (h, a)
            })
            .collect();
        Self::new(actions, perceptions, horizon, decisions)
    }

    pub fn constant(sig: &Signature, action: usize, horizon: usize) -> Result<Self> {
        Self::from_fn(sig.actions, sig.perceptions, horizon, |_| action)
    }

    fn check_total(&self) -> Result<()> {
        for h in perception_histories(self.perceptions.size, self.horizon) {
            match self.decisions.get(&h) {
                Some(&a) if a < self.actions.size => {}
                Some(&a) => {
                    return Err(Error::InvalidPolicy(format!(
                        "action {a} after {h:?} is outside the alphabet"
                    )))
                }
                None => return Err(Error::InvalidPolicy(format!("no action after {h:?}"))),
            }
        }
        if let Some(h) = self.decisions.keys().find(|h| {
            h.len() >= self.horizon || h.iter().any(|&x| x >= self.perceptions.size)
        }) {
            return Err(Error::InvalidPolicy(format!("decision for impossible history {h:?}")));
        }
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn actions(&self) -> Alphabet {
        self.actions
    }

    pub fn perceptions(&self) -> Alphabet {
        self.perceptions
    }

    /// `y_k` after perceptions `x_{<k}`.
    pub fn act(&self, perceptions: &[usize]) -> usize {
        self.decisions[perceptions]
    }

    /// Decision table in canonical order.
    pub fn decisions(&self) -> BTreeMap<Vec<usize>, usize> {
        self.decisions.iter().map(|(k, &v)| (k.clone(), v)).collect()
    }

    /// Restriction to a shorter horizon.
    pub fn truncate(&self, horizon: usize) -> Result<Policy> {
        if horizon > self.horizon {
            return Err(Error::Precondition(format!(
                "cannot extend a horizon-{} policy to {horizon}",
                self.horizon
            )));
        }
        let decisions = self
            .decisions
            .iter()
            .filter(|(k, _)| k.len() < horizon)
            .map(|(k, &v)| (k.clone(), v))
            .collect();
        Policy::new(self.actions, self.perceptions, horizon, decisions)
    }

    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        if self.actions != sig.actions || self.perceptions != sig.perceptions {
            return Err(Error::AlphabetMismatch(format!(
                "policy alphabets {:?}/{:?}, environment {:?}/{:?}",
                self.actions, self.perceptions, sig.actions, sig.perceptions
            )));
        }
        Ok(())
    }
}

/// All perception histories of length `< horizon`, shortest first.
pub fn perception_histories(alphabet: usize, horizon: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 1..horizon {
        let mut next = Vec::new();
        for h in &frontier {
            for x in 0..alphabet {
                let mut h2: Vec<usize> = h.clone();
                h2.push(x);
                next.push(h2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    if horizon == 0 {
        out.clear();
    }
    out
}

/// Fixed-width history strings `y1 x1 … y_m x_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HistoryCodec {
    pub action_width: usize,
    pub perception_width: usize,
    pub horizon: usize,
}

impl HistoryCodec {
    /// `n = m·(w_Y + w_X)`
    pub fn n(&self) -> usize {
        self.horizon * (self.action_width + self.perception_width)
    }

    /// Encodes a (possibly partial) history.
    pub fn encode(&self, history: &[Cycle]) -> BitString {
        let mut out = BitString::empty();
        for &(y, x) in history {
            out.extend_from(&BitString::from_uint(y as u64, self.action_width));
            out.extend_from(&BitString::from_uint(x as u64, self.perception_width));
        }
        out
    }

    pub fn decode(&self, bits: &BitString) -> Option<Vec<Cycle>> {
        let cw = self.action_width + self.perception_width;
        if cw == 0 || !bits.len().is_multiple_of(cw) {
            return None;
        }
        (0..bits.len() / cw)
            .map(|k| {
                let s = k * cw;
                let y = bits.slice(s, s + self.action_width).to_uint()? as usize;
                let x = bits.slice(s + self.action_width, s + cw).to_uint()? as usize;
                Some((y, x))
            })
            .collect()
    }
}

/// Shared handle to any environment.
pub type EnvRef = Arc<dyn Environment>;
