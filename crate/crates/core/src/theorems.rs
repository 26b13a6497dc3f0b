//! Exhaustive checkers for the four simplification theorems.
//!
//! Each checker scans an explicit family of players, finds the witness the
//! theorem promises, re-verifies it with a second independent scan, and
//! measures the additive slack against the theorem's target. Slack is
//! reported, not bounded: the theorems' constants are machine-dependent.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::complexity::{lz_estimate, ComplexityModel};
use crate::encoding::{encode_set, Context};
use crate::error::{Error, Result};
use crate::measures::info_single;
use crate::players::Player;
use crate::quantity::{LogSum, Quantity};

/// A named, nonempty list of players over a common length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayerFamily {
    pub name: String,
    members: Vec<Player>,
}

impl PlayerFamily {
    pub fn new(name: impl Into<String>, members: Vec<Player>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Precondition("player family is empty".into()))?;
        if let Some(bad) = members.iter().find(|p| p.n() != first.n()) {
            return Err(Error::LengthMismatch {
                expected: first.n(),
                got: bad.n(),
            });
        }
        Ok(PlayerFamily {
            name: name.into(),
            members,
        })
    }

    /// All `size`-element subsets of `{0,1}^n`, in lexicographic order of
    /// their sorted member lists.
    pub fn all_subsets(n: usize, size: usize) -> Result<Self> {
        if n > 4 {
            return Err(Error::ScaleLimit(format!("all subsets of {{0,1}}^{n}")));
        }
        let universe: Vec<BitString> = (0..1u64 << n).map(|i| BitString::from_uint(i, n)).collect();
        let mut members = Vec::new();
        let mut pick = Vec::new();
        fn choose(
            universe: &[BitString],
            start: usize,
            size: usize,
            pick: &mut Vec<BitString>,
            out: &mut Vec<Vec<BitString>>,
        ) {
            if pick.len() == size {
                out.push(pick.clone());
                return;
            }
            for i in start..universe.len() {
                pick.push(universe[i].clone());
                choose(universe, i + 1, size, pick, out);
                pick.pop();
            }
        }
        let mut sets = Vec::new();
        choose(&universe, 0, size, &mut pick, &mut sets);
        for s in sets {
            members.push(Player::new(n, s)?);
        }
        Self::new(format!("subsets(n={n},size={size})"), members)
    }

    /// `{{x} : x ∈ {0,1}^n}`.
    pub fn singletons(n: usize) -> Result<Self> {
        if n > 12 {
            return Err(Error::ScaleLimit(format!("singletons over {{0,1}}^{n}")));
        }
        let members = (0..1u64 << n)
            .map(|i| Player::new(n, [BitString::from_uint(i, n)]))
            .collect::<Result<_>>()?;
        Self::new(format!("singletons(n={n})"), members)
    }

    pub fn members(&self) -> &[Player] {
        &self.members
    }

    pub fn n(&self) -> usize {
        self.members[0].n()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn with(mut self, extra: Player) -> Result<Self> {
        self.members.push(extra);
        let name = self.name.clone();
        Self::new(name, self.members)
    }

    pub fn position(&self, p: &Player) -> Option<usize> {
        self.members.iter().position(|m| m == p)
    }

    /// Set-encoding of the member encodings.
    pub fn encode(&self) -> BitString {
        let codes: Vec<BitString> = self.members.iter().map(Player::encode).collect();
        encode_set(codes.iter())
    }
}

/// The witness player picked by a checker.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// position in the family
    pub index: usize,
    pub members: Vec<BitString>,
    pub complexity: Quantity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem: u8,
    pub family: String,
    pub family_size: usize,
    pub n: usize,
    pub model: String,
    pub inputs_digest: String,
    /// LZ estimate of the serialized family, recorded for the
    /// family-simplicity side condition.
    pub family_lz: u64,
    /// `false` when the theorem's hypothesis is not met by the instance.
    pub claim: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Quantity>,
    /// The complexity ceiling over all candidates (covering theorem).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<Quantity>,
    /// Qualifying count and `k = ⌊log2 N⌋`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count_at_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_at_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub info: Option<Quantity>,
    /// `C(B | A, x) − log2 N` from the counting step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counting_residual: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_given_x: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levin_a: Option<Quantity>,
    pub witness: Option<Witness>,
    pub target: Quantity,
    /// `found − target`
    pub slack: Quantity,
    pub exhaustive: bool,
    pub verified: bool,
}

fn digest(parts: &[&BitString]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.to_string().as_bytes());
        h.update(b"|");
    }
    hex::encode(h.finalize())
}

fn floor_log2(n: usize) -> Option<u32> {
    (n > 0).then(|| usize::BITS - 1 - n.leading_zeros())
}

/// Index of the smallest score among `eligible`, first in family order on
/// ties. `None` when nothing is eligible.
fn argmin(scores: &[Quantity], eligible: &[bool]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        if eligible[i] && best.is_none_or(|b| s.min_cmp(&scores[b]) == Ordering::Less) {
            best = Some(i);
        }
    }
    best
}

/// Second, sequential scan: the witness is eligible and nothing eligible
/// scores strictly lower.
fn reverify(
    family: &PlayerFamily,
    witness: usize,
    eligible: &dyn Fn(&Player) -> bool,
    score: &dyn Fn(&Player) -> Quantity,
) -> bool {
    let w = &family.members[witness];
    if !eligible(w) {
        return false;
    }
    let ws = score(w);
    family
        .members
        .iter()
        .filter(|p| eligible(p))
        .all(|p| score(p).min_cmp(&ws) != Ordering::Less)
}

fn scores(family: &PlayerFamily, score: &(dyn Fn(&Player) -> Quantity + Sync)) -> Vec<Quantity> {
    family.members.par_iter().map(score).collect()
}

fn max_of<'a>(it: impl Iterator<Item = &'a Quantity>) -> Option<Quantity> {
    it.fold(None, |acc: Option<Quantity>, q| match acc {
        Some(a) if a.min_cmp(q) != Ordering::Less => Some(a),
        _ => Some(q.clone()),
    })
}

fn k_quantity(k: Option<u32>) -> Quantity {
    k.map_or(Quantity::Undefined, |k| Quantity::int(k as i64))
}

struct Base {
    family: String,
    family_size: usize,
    n: usize,
    model: String,
    family_lz: u64,
}

impl Base {
    fn new(family: &PlayerFamily, model: &dyn ComplexityModel) -> Self {
        Base {
            family: family.name.clone(),
            family_size: family.len(),
            n: family.n(),
            model: model.name(),
            family_lz: lz_estimate(&family.encode(), &Context::empty()),
        }
    }

    fn report(self, theorem: u8, inputs_digest: String) -> TheoremReport {
        TheoremReport {
            theorem,
            family: self.family,
            family_size: self.family_size,
            n: self.n,
            model: self.model,
            inputs_digest,
            family_lz: self.family_lz,
            claim: false,
            r: None,
            r_max: None,
            count: None,
            k: None,
            count_at_max: None,
            k_at_max: None,
            c: None,
            info: None,
            counting_residual: None,
            witness_given_x: None,
            levin_a: None,
            witness: None,
            target: Quantity::Undefined,
            slack: Quantity::Undefined,
            exhaustive: true,
            verified: false,
        }
    }
}

fn witness(family: &PlayerFamily, index: usize, complexity: &Quantity) -> Witness {
    Witness {
        index,
        members: family.members[index].members(),
        complexity: complexity.clone(),
    }
}

/// Covering: among the sets containing `x`, `N` of them have complexity at
/// most `r`; some container has complexity about `r − ⌊log2 N⌋`. With `r`
/// omitted the maximum container complexity is used.
pub fn check_covering(
    family: &PlayerFamily,
    x: &BitString,
    r: Option<Quantity>,
    model: &dyn ComplexityModel,
) -> Result<TheoremReport> {
    if x.len() != family.n() {
        return Err(Error::LengthMismatch {
            expected: family.n(),
            got: x.len(),
        });
    }
    let score = |p: &Player| model.complexity(&p.encode(), &Context::empty());
    let eligible = |p: &Player| p.contains(x);
    let comps = scores(family, &score);
    let contains: Vec<bool> = family.members.iter().map(eligible).collect();
    let mut rep = Base::new(family, model).report(1, digest(&[&family.encode(), x]));

    let r_max = max_of(comps.iter().zip(&contains).filter(|(_, &c)| c).map(|(q, _)| q));
    let r = r.or_else(|| r_max.clone());
    let count = |bound: &Quantity| {
        comps
            .iter()
            .zip(&contains)
            .filter(|(q, &c)| c && q.le(bound))
            .count()
    };
    if let Some(rm) = &r_max {
        let n = count(rm);
        rep.count_at_max = Some(n);
        rep.k_at_max = floor_log2(n);
    }
    rep.r_max = r_max;
    let Some(r) = r else {
        return Ok(rep);
    };
    let n = count(&r);
    rep.count = Some(n);
    rep.k = floor_log2(n);
    rep.r = Some(r.clone());
    if n == 0 {
        return Ok(rep);
    }
    rep.claim = true;
    let best = argmin(&comps, &contains).expect("a container exists");
    rep.target = r - k_quantity(rep.k);
    rep.slack = comps[best].clone() - rep.target.clone();
    rep.verified = reverify(family, best, &eligible, &score);
    rep.witness = Some(witness(family, best, &comps[best]));
    Ok(rep)
}

/// Approximation: for `x ∈ A∩B` some `B′ ∋ x` in the family has
/// `C(B′|A)` about `I(x:B|A)`.
pub fn check_approximation(
    family: &PlayerFamily,
    a: &Player,
    b: &Player,
    x: &BitString,
    model: &dyn ComplexityModel,
) -> Result<TheoremReport> {
    if family.position(b).is_none() {
        return Err(Error::Precondition("B is not a member of the family".into()));
    }
    if !a.intersect(b)?.contains(x) {
        return Err(Error::Precondition(format!("{x} is not in A∩B")));
    }
    let ea = a.encode();
    let ctx_a = Context::single(ea.clone());
    let ctx_ax = Context::new([ea.clone(), x.clone()]);
    let score = |p: &Player| model.complexity(&p.encode(), &ctx_a);
    let eligible = |p: &Player| p.contains(x);
    let comps = scores(family, &score);
    let contains: Vec<bool> = family.members.iter().map(eligible).collect();
    let mut rep = Base::new(family, model).report(2, digest(&[&family.encode(), &ea, &b.encode(), x]));

    let r = score(b);
    let n = comps
        .iter()
        .zip(&contains)
        .filter(|(q, &c)| c && q.le(&r))
        .count();
    let info = info_single(x, a, b, model);
    let counting = model.complexity(&b.encode(), &ctx_ax);
    rep.counting_residual = Some(match floor_log2(n) {
        Some(_) => counting - Quantity::Finite(LogSum::log2(n as u64)),
        None => Quantity::Undefined,
    });
    rep.count = Some(n);
    rep.k = floor_log2(n);
    rep.r = Some(r);
    rep.info = Some(info.clone());
    rep.claim = true;
    let best = argmin(&comps, &contains).expect("B contains x");
    rep.target = info;
    rep.slack = comps[best].clone() - rep.target.clone();
    rep.witness_given_x = Some(model.complexity(&family.members[best].encode(), &ctx_ax));
    rep.verified = reverify(family, best, &eligible, &score);
    rep.witness = Some(witness(family, best, &comps[best]));
    Ok(rep)
}

/// Information bound: some `B′` meeting `A` has `C(B′)` about `I(A:B)`.
pub fn check_info_bound(
    family: &PlayerFamily,
    a: &Player,
    b: &Player,
    model: &dyn ComplexityModel,
) -> Result<TheoremReport> {
    if family.position(b).is_none() {
        return Err(Error::Precondition("B is not a member of the family".into()));
    }
    if !a.interacts(b)? {
        return Err(Error::Precondition("A and B do not interact".into()));
    }
    let ea = a.encode();
    let eb = b.encode();
    let score = |p: &Player| model.complexity(&p.encode(), &Context::empty());
    let eligible = |p: &Player| a.interacts(p).unwrap_or(false);
    let comps = scores(family, &score);
    let meets: Vec<bool> = family.members.iter().map(eligible).collect();
    let mut rep = Base::new(family, model).report(3, digest(&[&family.encode(), &ea, &eb]));

    let info = model.complexity(&eb, &Context::empty()) - model.complexity(&eb, &Context::single(ea.clone()));
    rep.info = Some(info.clone());
    rep.levin_a = model.levin(&ea);
    rep.claim = true;
    let best = argmin(&comps, &meets).expect("B meets A");
    rep.target = info;
    rep.slack = comps[best].clone() - rep.target.clone();
    rep.verified = reverify(family, best, &eligible, &score);
    rep.witness = Some(witness(family, best, &comps[best]));
    Ok(rep)
}

/// Simplification: if `2^k` family members of complexity at most `r` meet
/// `A` in between 1 and `c` points, some member doing the same has
/// complexity about `r − k`. With `r` omitted the maximum over the
/// candidates is used.
pub fn check_simplification(
    family: &PlayerFamily,
    a: &Player,
    c: usize,
    r: Option<Quantity>,
    model: &dyn ComplexityModel,
) -> Result<TheoremReport> {
    if c == 0 {
        return Err(Error::Precondition("c must be at least 1".into()));
    }
    if a.n() != family.n() {
        return Err(Error::LengthMismatch {
            expected: family.n(),
            got: a.n(),
        });
    }
    let ea = a.encode();
    let score = |p: &Player| model.complexity(&p.encode(), &Context::empty());
    let eligible = |p: &Player| {
        let k = a.intersect(p).map(|s| s.len()).unwrap_or(0);
        0 < k && k <= c
    };
    let comps = scores(family, &score);
    let fits: Vec<bool> = family.members.iter().map(eligible).collect();
    let mut rep = Base::new(family, model).report(4, digest(&[&family.encode(), &ea]));
    rep.c = Some(c);
    rep.levin_a = model.levin(&ea);

    let r_max = max_of(comps.iter().zip(&fits).filter(|(_, &f)| f).map(|(q, _)| q));
    let r = r.or_else(|| r_max.clone());
    rep.r_max = r_max;
    let Some(r) = r else {
        return Ok(rep);
    };
    let q = comps
        .iter()
        .zip(&fits)
        .filter(|(s, &f)| f && s.le(&r))
        .count();
    rep.count = Some(q);
    rep.k = floor_log2(q);
    rep.r = Some(r.clone());
    if q == 0 {
        return Ok(rep);
    }
    rep.claim = true;
    let best = argmin(&comps, &fits).expect("a candidate exists");
    rep.target = r - k_quantity(rep.k);
    rep.slack = comps[best].clone() - rep.target.clone();
    rep.verified = reverify(family, best, &eligible, &score);
    rep.witness = Some(witness(family, best, &comps[best]));
    Ok(rep)
}
