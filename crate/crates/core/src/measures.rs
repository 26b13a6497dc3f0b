//! Information measures over players and their interactions.
//!
//! Every measure is a fixed algebraic combination of model calls and
//! cardinality logs. Because [`LogSum`] arithmetic is exact, the identities
//! relating the measures cancel to an exact zero for any model; a nonzero
//! residual can only mean a bug.

use serde::Serialize;

use crate::bits::BitString;
use crate::complexity::ComplexityModel;
use crate::encoding::Context;
use crate::error::{Error, Result};
use crate::players::Player;
use crate::quantity::{LogSum, Quantity};

fn card(n: usize) -> Quantity {
    Quantity::int(n as i64)
}

fn log_card(n: usize) -> Quantity {
    if n == 0 {
        Quantity::Infinite
    } else {
        Quantity::Finite(LogSum::log2(n as u64))
    }
}

fn ctx1(a: &Player) -> Context {
    Context::single(a.encode())
}

fn ctx2(a: &Player, b: &Player) -> Context {
    Context::new([a.encode(), b.encode()])
}

/// `R(B|A) = C(A∩B | A)`.
pub fn knowledge(a: &Player, b: &Player, model: &dyn ComplexityModel) -> Result<Quantity> {
    let ab = a.intersect(b)?;
    Ok(model.complexity(&ab.encode(), &ctx1(a)))
}

/// `δ(S|A) = |A| − C(S|A)` for `S ⊆ A`, `∞` otherwise.
pub fn deficiency_subset(s: &Player, a: &Player, model: &dyn ComplexityModel) -> Quantity {
    if !s.is_subset(a) {
        return Quantity::Infinite;
    }
    card(a.len()) - model.complexity(&s.encode(), &ctx1(a))
}

/// `δ(x|S) = log|S| − C(x|S)` for `x ∈ S`, `∞` otherwise.
pub fn deficiency_single(x: &BitString, s: &Player, model: &dyn ComplexityModel) -> Quantity {
    if !s.contains(x) {
        return Quantity::Infinite;
    }
    log_card(s.len()) - model.complexity(x, &ctx1(s))
}

/// `δ(x|A,B) = log|A∩B| − C(x|A,B)` for `x ∈ A∩B`, `∞` otherwise.
pub fn deficiency_pair(
    x: &BitString,
    a: &Player,
    b: &Player,
    model: &dyn ComplexityModel,
) -> Result<Quantity> {
    let ab = a.intersect(b)?;
    if !ab.contains(x) {
        return Ok(Quantity::Infinite);
    }
    Ok(log_card(ab.len()) - model.complexity(x, &ctx2(a, b)))
}

/// `I(x : B|A) = C(x|A) − C(x|A,B)`.
pub fn info_single(x: &BitString, a: &Player, b: &Player, model: &dyn ComplexityModel) -> Quantity {
    model.complexity(x, &ctx1(a)) - model.complexity(x, &ctx2(a, b))
}

/// `I(x : y) = C(y) − C(y|x)`.
pub fn mutual_info(x: &BitString, y: &BitString, model: &dyn ComplexityModel) -> Quantity {
    model.complexity(y, &Context::empty()) - model.complexity(y, &Context::single(x.clone()))
}

/// `I(x : y|z) = C(y|z) − C(y|x,z)`.
pub fn mutual_info_cond(
    x: &BitString,
    y: &BitString,
    z: &BitString,
    model: &dyn ComplexityModel,
) -> Quantity {
    model.complexity(y, &Context::single(z.clone()))
        - model.complexity(y, &Context::new([x.clone(), z.clone()]))
}

/// The deterministic-interaction reading `I(x:B|A) + δ(x|A)` against
/// `log|A|`. Reported, never asserted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeterministicReading {
    pub value: Quantity,
    pub residual: Quantity,
}

/// Everything measured about one interaction `x ∈ A∩B` under one model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExchangeReport {
    pub model: String,
    pub size_a: usize,
    pub size_b: usize,
    pub size_ab: usize,
    pub x: BitString,
    /// `R(B|A)`
    pub knowledge: Quantity,
    /// `δ(A∩B|A)`
    pub deficiency_subset: Quantity,
    /// `I(x:B|A)`
    pub info: Quantity,
    /// `δ(x|A)`
    pub deficiency_x_a: Quantity,
    /// `δ(x|A,B)`
    pub deficiency_x_ab: Quantity,
    /// `C(x|A)`, `C(x|B)`, `C(x|A,B)`
    pub c_x_a: Quantity,
    pub c_x_b: Quantity,
    pub c_x_ab: Quantity,
    /// `R(B|A) + δ(A∩B|A) − |A|`
    pub eq2_residual: Quantity,
    /// `I(x:B|A) + δ(x|A) − log(|A|/|A∩B|) − δ(x|A,B)`
    pub eq5_residual: Quantity,
    /// `log(|A|/|A∩B|) + δ(x|A,B) − I(x:A|B) − δ(x|B)`, only when `|A| = |B|`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eq6_residual: Option<Quantity>,
    pub deterministic: DeterministicReading,
}

impl ExchangeReport {
    /// All asserted identities hold exactly. Residuals that are undefined
    /// because the model returned `∞` are not counted as violations.
    pub fn identities_hold(&self) -> bool {
        let ok = |q: &Quantity| !q.is_finite() || q.is_exact_zero();
        ok(&self.eq2_residual) && ok(&self.eq5_residual) && self.eq6_residual.as_ref().is_none_or(ok)
    }

    pub fn all_finite(&self) -> bool {
        self.eq2_residual.is_finite()
            && self.eq5_residual.is_finite()
            && self.eq6_residual.as_ref().is_none_or(Quantity::is_finite)
    }
}

/// Computes every measure for `x ∈ A∩B` and checks the exact identities.
pub fn exchange_report(
    a: &Player,
    b: &Player,
    x: &BitString,
    model: &dyn ComplexityModel,
) -> Result<ExchangeReport> {
    let ab = a.intersect(b)?;
    if !ab.contains(x) {
        return Err(Error::Precondition(format!("{x} is not in A∩B")));
    }
    let ca = model.complexity(x, &ctx1(a));
    let cb = model.complexity(x, &ctx1(b));
    let cab = model.complexity(x, &ctx2(a, b));
    let c_ab_given_a = model.complexity(&ab.encode(), &ctx1(a));

    let knowledge = c_ab_given_a.clone();
    let deficiency_subset = card(a.len()) - c_ab_given_a;
    let info = ca.clone() - cab.clone();
    let deficiency_x_a = log_card(a.len()) - ca.clone();
    let deficiency_x_ab = log_card(ab.len()) - cab.clone();
    let log_ratio = log_card(a.len()) - log_card(ab.len());

    let eq2_residual = knowledge.clone() + deficiency_subset.clone() - card(a.len());
    let lhs5 = info.clone() + deficiency_x_a.clone();
    let eq5_residual = lhs5.clone() - log_ratio.clone() - deficiency_x_ab.clone();
    let eq6_residual = (a.len() == b.len()).then(|| {
        let info_ba = cb.clone() - cab.clone();
        let deficiency_x_b = log_card(b.len()) - cb.clone();
        log_ratio.clone() + deficiency_x_ab.clone() - info_ba - deficiency_x_b
    });
    let deterministic = DeterministicReading {
        residual: lhs5.clone() - log_card(a.len()),
        value: lhs5,
    };

    let report = ExchangeReport {
        model: model.name(),
        size_a: a.len(),
        size_b: b.len(),
        size_ab: ab.len(),
        x: x.clone(),
        knowledge,
        deficiency_subset,
        info,
        deficiency_x_a,
        deficiency_x_ab,
        c_x_a: ca,
        c_x_b: cb,
        c_x_ab: cab,
        eq2_residual,
        eq5_residual,
        eq6_residual,
        deterministic,
    };
    if !report.identities_hold() {
        return Err(Error::IdentityViolated(format!(
            "residuals eq2={} eq5={} eq6={:?}",
            report.eq2_residual, report.eq5_residual, report.eq6_residual
        )));
    }
    Ok(report)
}
