//! Exact values, expectimax, and the history-set translations.

use std::collections::HashMap;

use num::rational::BigRational;
use num::Zero;

use super::{Cycle, Environment, Policy};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::players::Player;

fn reward_q(env: &dyn Environment, x: usize) -> BigRational {
    BigRational::from_integer(env.signature().reward(x).into())
}

/// `V^{p,μ}_{1:m}`: expected reward sum, by full enumeration of perception
/// sequences with actions fixed by `p`.
pub fn value(policy: &Policy, env: &dyn Environment, horizon: usize) -> Result<BigRational> {
    policy.check_signature(env.signature())?;
    if horizon > policy.horizon() {
        return Err(Error::Precondition(format!(
            "horizon {horizon} exceeds the policy's {}",
            policy.horizon()
        )));
    }
    fn rec(
        policy: &Policy,
        env: &dyn Environment,
        h: &mut Vec<Cycle>,
        xs: &mut Vec<usize>,
        horizon: usize,
    ) -> BigRational {
        if h.len() == horizon {
            return BigRational::zero();
        }
        let y = policy.act(xs);
        let mut total = BigRational::zero();
        for (x, p) in env.conditional(h, y).into_iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            h.push((y, x));
            xs.push(x);
            let cont = rec(policy, env, h, xs, horizon);
            h.pop();
            xs.pop();
            total += p * (reward_q(env, x) + cont);
        }
        total
    }
    Ok(rec(policy, env, &mut Vec::new(), &mut Vec::new(), horizon))
}

/// Backward-induction expectimax with memoised future values.
pub(crate) struct Expectimax<'a> {
    env: &'a dyn Environment,
    horizon: usize,
    memo: HashMap<Vec<Cycle>, BigRational>,
}

impl<'a> Expectimax<'a> {
    pub(crate) fn new(env: &'a dyn Environment, horizon: usize) -> Self {
        Expectimax {
            env,
            horizon,
            memo: HashMap::new(),
        }
    }

    /// Expected reward of cycle `y` after `h` under optimal continuation.
    fn action_value(&mut self, h: &[Cycle], y: usize) -> BigRational {
        let mut total = BigRational::zero();
        let mut next = h.to_vec();
        for (x, p) in self.env.conditional(h, y).into_iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            next.push((y, x));
            let cont = self.future(&next);
            next.pop();
            total += p * (reward_q(self.env, x) + cont);
        }
        total
    }

    /// Optimal expected reward of the remaining cycles after `h`, with the
    /// lexicographically smallest maximising action.
    pub(crate) fn best(&mut self, h: &[Cycle]) -> (usize, BigRational) {
        let mut best = (0, BigRational::zero());
        for y in 0..self.env.signature().actions.size {
            let v = self.action_value(h, y);
            if y == 0 || v > best.1 {
                best = (y, v);
            }
        }
        best
    }

    pub(crate) fn future(&mut self, h: &[Cycle]) -> BigRational {
        if h.len() >= self.horizon {
            return BigRational::zero();
        }
        if let Some(v) = self.memo.get(h) {
            return v.clone();
        }
        let v = self.best(h).1;
        self.memo.insert(h.to_vec(), v.clone());
        v
    }

    /// `V*_{1:m}(yx_{1:k})`: realised reward plus optimal future.
    pub(crate) fn value_at(&mut self, h: &[Cycle]) -> BigRational {
        let realised = BigRational::from_integer(self.env.signature().total_reward(h).into());
        realised + self.future(h)
    }

    /// The arg-max policy `p^μ`, total on every perception history.
    pub(crate) fn policy(&mut self) -> Result<Policy> {
        let sig = self.env.signature().clone();
        let mut decisions = HashMap::new();
        let mut h = Vec::new();
        let mut xs = Vec::new();
        self.fill(&mut h, &mut xs, &mut decisions);
        Policy::new(sig.actions, sig.perceptions, self.horizon, decisions)
    }

    fn fill(
        &mut self,
        h: &mut Vec<Cycle>,
        xs: &mut Vec<usize>,
        decisions: &mut HashMap<Vec<usize>, usize>,
    ) {
        if h.len() >= self.horizon {
            return;
        }
        let (y, _) = self.best(h);
        decisions.insert(xs.clone(), y);
        for x in 0..self.env.signature().perceptions.size {
            h.push((y, x));
            xs.push(x);
            self.fill(h, xs, decisions);
            h.pop();
            xs.pop();
        }
    }
}

fn check_in_support(env: &dyn Environment, history: &[Cycle]) -> Result<()> {
    let sig = env.signature();
    if history
        .iter()
        .any(|&(y, x)| y >= sig.actions.size || x >= sig.perceptions.size)
    {
        return Err(Error::AlphabetMismatch(format!(
            "history {history:?} has symbols outside the alphabets"
        )));
    }
    if !history.is_empty() && env.joint(history).is_zero() {
        return Err(Error::OutsideSupport(format!("{history:?}")));
    }
    Ok(())
}

/// `V*_{1:m}(yx_{1:k}) = r(x_{1:k})` + optimal expected future reward.
/// The empty history gives `V*_{1:m}`.
pub fn optimal_value(
    env: &dyn Environment,
    horizon: usize,
    history: &[Cycle],
) -> Result<BigRational> {
    if history.len() > horizon {
        return Err(Error::Precondition(format!(
            "history of {} cycles exceeds horizon {horizon}",
            history.len()
        )));
    }
    check_in_support(env, history)?;
    Ok(Expectimax::new(env, horizon).value_at(history))
}

/// `p^μ = argmax_p V^{p,μ}_{1:m}`, ties broken toward the smallest action.
pub fn optimal_policy(env: &dyn Environment, horizon: usize) -> Result<Policy> {
    Expectimax::new(env, horizon).policy()
}

/// `A^p_m`: every history whose actions follow `p`, perceptions free.
pub fn agent_set(policy: &Policy, horizon: usize) -> Result<Player> {
    if horizon > policy.horizon() {
        return Err(Error::Precondition(format!(
            "horizon {horizon} exceeds the policy's {}",
            policy.horizon()
        )));
    }
    let codec = super::HistoryCodec {
        action_width: policy.actions().width,
        perception_width: policy.perceptions().width,
        horizon,
    };
    let nx = policy.perceptions().size;
    let mut members = Vec::new();
    let mut stack: Vec<(Vec<Cycle>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
    while let Some((h, xs)) = stack.pop() {
        if h.len() == horizon {
            members.push(codec.encode(&h));
            continue;
        }
        let y = policy.act(&xs);
        for x in 0..nx {
            let mut h2 = h.clone();
            h2.push((y, x));
            let mut xs2 = xs.clone();
            xs2.push(x);
            stack.push((h2, xs2));
        }
    }
    Player::new(codec.n(), members)
}

/// Walks every history in `env`'s support up to `horizon`, calling `keep`
/// on each prefix (depth ≥ 1); a `false` prunes the subtree. Returns the
/// full-length histories that survived.
fn support_walk(
    env: &dyn Environment,
    horizon: usize,
    keep: &mut dyn FnMut(&[Cycle]) -> bool,
) -> Vec<Vec<Cycle>> {
    fn rec(
        env: &dyn Environment,
        h: &mut Vec<Cycle>,
        horizon: usize,
        keep: &mut dyn FnMut(&[Cycle]) -> bool,
        out: &mut Vec<Vec<Cycle>>,
    ) {
        if h.len() == horizon {
            out.push(h.clone());
            return;
        }
        for y in 0..env.signature().actions.size {
            for (x, p) in env.conditional(h, y).into_iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                h.push((y, x));
                if keep(h) {
                    rec(env, h, horizon, keep, out);
                }
                h.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(env, &mut Vec::new(), horizon, keep, &mut out);
    out
}

/// `B^μ_{m,τ}`: histories in the support with total reward at least `τ`.
pub fn env_set_b(env: &dyn Environment, horizon: usize, tau: &BigRational) -> Result<Player> {
    let sig = env.signature().clone();
    let codec = sig.codec(horizon);
    let members = support_walk(env, horizon, &mut |_| true)
        .into_iter()
        .filter(|h| &BigRational::from_integer(sig.total_reward(h).into()) >= tau)
        .map(|h| codec.encode(&h));
    Player::new(codec.n(), members)
}

/// `D^μ_{m,τ}`: histories in the support whose every prefix keeps
/// `V*(yx_{1:k}) / V* ≥ τ`. Undefined when `V* = 0`.
pub fn env_set_d(env: &dyn Environment, horizon: usize, tau: &BigRational) -> Result<Player> {
    let codec = env.signature().codec(horizon);
    let mut solver = Expectimax::new(env, horizon);
    let v_star = solver.future(&[]);
    if v_star.is_zero() {
        return Err(Error::Undefined(format!(
            "optimal value of {} at horizon {horizon} is 0",
            env.name()
        )));
    }
    let members = support_walk(env, horizon, &mut |h| {
        solver.value_at(h) / &v_star >= *tau
    })
    .into_iter()
    .map(|h| codec.encode(&h));
    Player::new(codec.n(), members)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SetVariant {
    B,
    D,
}

/// Whether `A^p_m ∩ B^μ_{m,τ}` (or `D`) is nonempty, with its first member.
pub fn interacts_at(
    policy: &Policy,
    env: &dyn Environment,
    horizon: usize,
    tau: &BigRational,
    variant: SetVariant,
) -> Result<(bool, Option<BitString>)> {
    policy.check_signature(env.signature())?;
    let a = agent_set(policy, horizon)?;
    let other = match variant {
        SetVariant::B => env_set_b(env, horizon, tau)?,
        SetVariant::D => env_set_d(env, horizon, tau)?,
    };
    let common = a.intersect(&other)?;
    Ok((!common.is_empty(), common.first()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use crate::cybernetic::{echo, fair_coin, Signature};
    use crate::quantity::ratio;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn echo_values() {
        let sig = Signature::binary();
        let ones = Policy::constant(&sig, 1, 2).unwrap();
        let zeros = Policy::constant(&sig, 0, 2).unwrap();
        assert_eq!(value(&ones, &echo(), 2).unwrap(), q(2));
        assert_eq!(value(&zeros, &echo(), 2).unwrap(), q(0));
        assert_eq!(value(&zeros, &fair_coin(), 2).unwrap(), q(1));
        assert_eq!(value(&ones, &fair_coin(), 2).unwrap(), q(1));
    }

    #[test]
    fn optimal_values() {
        assert_eq!(optimal_value(&echo(), 2, &[]).unwrap(), q(2));
        assert_eq!(optimal_value(&echo(), 2, &[(0, 0)]).unwrap(), q(1));
        assert_eq!(optimal_value(&fair_coin(), 2, &[]).unwrap(), q(1));
        assert!(matches!(
            optimal_value(&echo(), 2, &[(0, 1)]),
            Err(Error::OutsideSupport(_))
        ));
        let p = optimal_policy(&echo(), 3).unwrap();
        assert!(p.decisions().values().all(|&a| a == 1));
        // fair coin: every action ties, so the smallest wins
        let p = optimal_policy(&fair_coin(), 2).unwrap();
        assert!(p.decisions().values().all(|&a| a == 0));
    }

    #[test]
    fn agent_sets() {
        let sig = Signature::binary();
        let ones = Policy::constant(&sig, 1, 2).unwrap();
        let a = agent_set(&ones, 2).unwrap();
        assert_eq!(a.members(), vec![bs("1010"), bs("1011"), bs("1110"), bs("1111")]);
        let zeros = Policy::constant(&sig, 0, 2).unwrap();
        let a = agent_set(&zeros, 2).unwrap();
        assert_eq!(a.members(), vec![bs("0000"), bs("0001"), bs("0100"), bs("0101")]);
    }

    #[test]
    fn echo_b_and_d_sets() {
        let env = echo();
        assert_eq!(env_set_b(&env, 2, &q(2)).unwrap().members(), vec![bs("1111")]);
        assert_eq!(
            env_set_b(&env, 2, &q(1)).unwrap().members(),
            vec![bs("0011"), bs("1100"), bs("1111")]
        );
        assert_eq!(env_set_b(&env, 2, &q(0)).unwrap().len(), 4);
        assert_eq!(env_set_d(&env, 2, &q(1)).unwrap().members(), vec![bs("1111")]);
        assert_eq!(
            env_set_d(&env, 2, &ratio(1, 2)).unwrap().members(),
            vec![bs("0011"), bs("1100"), bs("1111")]
        );
        assert_eq!(env_set_d(&env, 2, &q(0)).unwrap().len(), 4);
    }

    #[test]
    fn d_undefined_when_nothing_to_gain() {
        let anti_zero = crate::cybernetic::TableEnvironment::new(
            "zero",
            Signature::binary(),
            crate::cybernetic::Kernel::Memoryless(vec![vec![q(1), q(0)], vec![q(1), q(0)]]),
        )
        .unwrap();
        assert!(matches!(env_set_d(&anti_zero, 2, &q(0)), Err(Error::Undefined(_))));
    }

    #[test]
    fn interaction_examples() {
        let sig = Signature::binary();
        let ones = Policy::constant(&sig, 1, 2).unwrap();
        let zeros = Policy::constant(&sig, 0, 2).unwrap();
        assert_eq!(
            interacts_at(&ones, &echo(), 2, &q(2), SetVariant::B).unwrap(),
            (true, Some(bs("1111")))
        );
        assert_eq!(
            interacts_at(&zeros, &echo(), 2, &q(2), SetVariant::B).unwrap(),
            (false, None)
        );
        assert!(interacts_at(&zeros, &fair_coin(), 2, &q(0), SetVariant::B).unwrap().0);
    }
}
