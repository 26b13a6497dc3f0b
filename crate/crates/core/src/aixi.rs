//! Bayes mixtures over small environment families, the expectimax agent
//! against the mixture, and the interaction-universality sweep.

use std::ops::RangeInclusive;

use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::Serialize;

use crate::bits::BitString;
use crate::complexity::lz_estimate;
use crate::cybernetic::{
    agent_set, check_proper, env_set_d, optimal_policy, Cycle, Environment, EnvironmentFile,
    Policy, Signature, TableEnvironment,
};
use crate::encoding::Context;
use crate::error::{Error, Result};
use crate::quantity::fmt_ratio;

/// Desk-scale limits for expectimax against a mixture.
pub const MAX_ALPHABET: usize = 4;
pub const MAX_HORIZON: usize = 6;

/// Environments with positive weights summing to 1.
#[derive(Clone, Debug)]
pub struct WeightedFamily {
    members: Vec<TableEnvironment>,
    weights: Vec<BigRational>,
}

impl WeightedFamily {
    /// Explicit weights are normalized; `None` derives `w_i ∝ 2^{−ℓ_i}`
    /// with `ℓ_i` the LZ estimate of the environment's canonical form.
    pub fn new(members: Vec<TableEnvironment>, weights: Option<Vec<BigRational>>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidEnvironment("empty environment family".into()))?;
        let sig = first.signature().clone();
        for m in &members[1..] {
            sig.check_compatible(m.signature())?;
            if m.signature().rewards != sig.rewards {
                return Err(Error::AlphabetMismatch(format!(
                    "{} and {} use different reward maps",
                    first.name(),
                    m.name()
                )));
            }
        }
        let raw = match weights {
            Some(w) => {
                if w.len() != members.len() {
                    return Err(Error::InvalidEnvironment(format!(
                        "{} weights for {} environments",
                        w.len(),
                        members.len()
                    )));
                }
                if w.iter().any(|v| !v.is_positive()) {
                    return Err(Error::InvalidEnvironment("weights must be positive".into()));
                }
                w
            }
            None => members.iter().map(default_weight).collect(),
        };
        let total: BigRational = raw.iter().sum();
        let weights = raw.iter().map(|w| w / &total).collect();
        Ok(WeightedFamily { members, weights })
    }

    pub fn equal(members: Vec<TableEnvironment>) -> Result<Self> {
        let w = vec![BigRational::one(); members.len()];
        Self::new(members, Some(w))
    }

    pub fn members(&self) -> &[TableEnvironment] {
        &self.members
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn signature(&self) -> &Signature {
        self.members[0].signature()
    }

    /// Every member must be a proper measure up to `horizon`.
    pub fn check_proper(&self, horizon: usize) -> Result<()> {
        self.members.iter().try_for_each(|m| check_proper(m, horizon))
    }

    pub fn mixture(&self) -> Mixture<'_> {
        Mixture { family: self }
    }
}

/// `2^{−ℓ}` for `ℓ` the LZ estimate of the canonical table bits.
pub fn default_weight(env: &TableEnvironment) -> BigRational {
    let bits = EnvironmentFile::from_environment(env).canonical_bits();
    let len = lz_estimate(&bits, &Context::empty());
    BigRational::new(1.into(), num::BigInt::one() << len)
}

/// `ξ(yx_{1:k}) = Σ_i w_i ρ_i(yx_{1:k})`.
pub struct Mixture<'a> {
    family: &'a WeightedFamily,
}

impl Mixture<'_> {
    /// Posterior weights `w_i ρ_i(h) / ξ(h)`; all zero off the support.
    pub fn posterior(&self, history: &[Cycle]) -> Vec<BigRational> {
        let terms: Vec<BigRational> = self
            .family
            .members
            .iter()
            .zip(&self.family.weights)
            .map(|(m, w)| w * m.joint(history))
            .collect();
        let total: BigRational = terms.iter().sum();
        if total.is_zero() {
            return terms;
        }
        terms.into_iter().map(|t| t / &total).collect()
    }
}

impl Environment for Mixture<'_> {
    fn name(&self) -> &str {
        "mixture"
    }

    fn signature(&self) -> &Signature {
        self.family.signature()
    }

    /// Off the support the posterior is undefined; the prior weights stand
    /// in, so a one-member mixture agrees with its member everywhere.
    fn conditional(&self, history: &[Cycle], action: usize) -> Vec<BigRational> {
        let nx = self.signature().perceptions.size;
        let mut post = self.posterior(history);
        if post.iter().all(Zero::is_zero) {
            post = self.family.weights.clone();
        }
        let mut out = vec![BigRational::zero(); nx];
        for (m, w) in self.family.members.iter().zip(&post) {
            if w.is_zero() {
                continue;
            }
            for (x, p) in m.conditional(history, action).into_iter().enumerate() {
                out[x] += w * p;
            }
        }
        out
    }

    fn joint(&self, history: &[Cycle]) -> BigRational {
        self.family
            .members
            .iter()
            .zip(&self.family.weights)
            .map(|(m, w)| w * m.joint(history))
            .sum()
    }
}

fn check_scale(sig: &Signature, horizon: usize) -> Result<()> {
    if sig.actions.size > MAX_ALPHABET || sig.perceptions.size > MAX_ALPHABET {
        return Err(Error::ScaleLimit(format!(
            "alphabets {}x{} exceed {MAX_ALPHABET}",
            sig.actions.size, sig.perceptions.size
        )));
    }
    if horizon > MAX_HORIZON {
        return Err(Error::ScaleLimit(format!("horizon {horizon} exceeds {MAX_HORIZON}")));
    }
    Ok(())
}

/// `p^ξ_m`: the expectimax policy against the family's mixture.
pub fn aixi_policy(family: &WeightedFamily, horizon: usize) -> Result<Policy> {
    check_scale(family.signature(), horizon)?;
    family.check_proper(horizon)?;
    optimal_policy(&family.mixture(), horizon)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalityCell {
    pub m: usize,
    /// `None` when the environment's optimal value is 0 at this horizon.
    pub interacts: Option<bool>,
    pub witness: Option<BitString>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalityRow {
    pub env: String,
    pub tau: String,
    pub cells: Vec<UniversalityCell>,
    pub first_m: Option<usize>,
}

/// For each member `ν`, threshold `τ` and horizon `m`: does the mixture
/// agent's history set meet `D^ν_{m,τ}`?
pub fn universality_experiment(
    family: &WeightedFamily,
    taus: &[BigRational],
    horizons: RangeInclusive<usize>,
) -> Result<Vec<UniversalityRow>> {
    let policies = horizons
        .clone()
        .map(|m| Ok((m, aixi_policy(family, m)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for env in &family.members {
        for tau in taus {
            let mut cells = Vec::new();
            for (m, policy) in &policies {
                let cell = match env_set_d(env, *m, tau) {
                    Ok(d) => {
                        let common = agent_set(policy, *m)?.intersect(&d)?;
                        UniversalityCell {
                            m: *m,
                            interacts: Some(!common.is_empty()),
                            witness: common.first(),
                        }
                    }
                    Err(Error::Undefined(_)) => UniversalityCell {
                        m: *m,
                        interacts: None,
                        witness: None,
                    },
                    Err(e) => return Err(e),
                };
                cells.push(cell);
            }
            let first_m = cells.iter().find(|c| c.interacts == Some(true)).map(|c| c.m);
            rows.push(UniversalityRow {
                env: env.name().to_string(),
                tau: fmt_ratio(tau),
                cells,
                first_m,
            });
        }
    }
    Ok(rows)
}

/// One line per `(ν, τ, m)`: `env,tau,m,interacts,witness`.
pub fn universality_csv(rows: &[UniversalityRow]) -> String {
    let mut out = String::from("env,tau,m,interacts,witness\n");
    for row in rows {
        for c in &row.cells {
            let interacts = match c.interacts {
                Some(b) => b.to_string(),
                None => "undefined".into(),
            };
            let witness = c.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{}\n", row.env, row.tau, c.m, interacts, witness));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use crate::cybernetic::{anti, echo, fair_coin, optimal_value, value};
    use crate::quantity::ratio;

    fn pair() -> WeightedFamily {
        WeightedFamily::equal(vec![echo(), anti()]).unwrap()
    }

    #[test]
    fn mixture_arithmetic() {
        let fam = pair();
        let xi = fam.mixture();
        assert_eq!(xi.conditional(&[], 1), vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(xi.posterior(&[(1, 1)]), vec![ratio(1, 1), ratio(0, 1)]);
        assert_eq!(xi.joint(&[(1, 1), (0, 0)]), ratio(1, 2));
        let solo = WeightedFamily::equal(vec![echo()]).unwrap();
        let h = [(0, 0), (1, 1)];
        assert_eq!(solo.mixture().joint(&h), echo().joint(&h));
    }

    #[test]
    fn default_weights_normalize() {
        let fam = WeightedFamily::new(vec![echo(), anti(), fair_coin()], None).unwrap();
        let total: BigRational = fam.weights().iter().sum();
        assert_eq!(total, BigRational::one());
        assert!(fam.weights().iter().all(|w| w.is_positive()));
    }

    #[test]
    fn family_validation() {
        assert!(WeightedFamily::new(vec![], None).is_err());
        assert!(WeightedFamily::new(vec![echo()], Some(vec![ratio(0, 1)])).is_err());
        assert!(WeightedFamily::new(vec![echo()], Some(vec![])).is_err());
    }

    #[test]
    fn two_cycle_agent() {
        let fam = pair();
        let p = aixi_policy(&fam, 2).unwrap();
        assert_eq!(p.act(&[]), 0);
        // after x=0 under action 0 the world is echo: play 1
        assert_eq!(p.act(&[0]), 1);
        // after x=1 the world is anti: play 0
        assert_eq!(p.act(&[1]), 0);
        assert_eq!(value(&p, &fam.mixture(), 2).unwrap(), ratio(3, 2));
        assert_eq!(aixi_policy(&fam, 1).unwrap().act(&[]), 0);

        let solo = WeightedFamily::equal(vec![echo()]).unwrap();
        let p = aixi_policy(&solo, 3).unwrap();
        assert_eq!(p, optimal_policy(&echo(), 3).unwrap());
        assert_eq!(value(&p, &echo(), 3).unwrap(), optimal_value(&echo(), 3, &[]).unwrap());
    }

    #[test]
    fn scale_limits() {
        assert!(matches!(aixi_policy(&pair(), 7), Err(Error::ScaleLimit(_))));
    }

    #[test]
    fn universality_pins() {
        let rows = universality_experiment(&pair(), &[ratio(1, 2)], 1..=3).unwrap();
        let echo_row = &rows[0];
        assert_eq!(echo_row.env, "echo");
        assert_eq!(echo_row.first_m, Some(2));
        assert_eq!(echo_row.cells[1].witness, Some(bs("0011")));

        let zero = universality_experiment(&pair(), &[ratio(0, 1)], 1..=3).unwrap();
        assert!(zero.iter().all(|r| r.cells.iter().all(|c| c.interacts == Some(true))));

        let solo = WeightedFamily::equal(vec![echo()]).unwrap();
        let one = universality_experiment(&solo, &[ratio(1, 1)], 1..=4).unwrap();
        assert!(one[0].cells.iter().all(|c| c.interacts == Some(true)));
        assert_eq!(one[0].cells[3].witness, Some(bs("11111111")));

        let csv = universality_csv(&rows);
        assert!(csv.starts_with("env,tau,m,interacts,witness\necho,1/2,1,false,\n"));
    }

    #[test]
    fn average_gap_shrinks() {
        let fam = pair();
        for m in 1..=6 {
            let p = aixi_policy(&fam, m).unwrap();
            for env in [echo(), anti()] {
                let gap = optimal_value(&env, m, &[]).unwrap() - value(&p, &env, m).unwrap();
                assert!(gap >= BigRational::zero() && gap <= BigRational::one());
            }
        }
    }
}
