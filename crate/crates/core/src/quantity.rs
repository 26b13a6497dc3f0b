//! Exact code-length arithmetic.
//!
//! Every quantity the workbench computes has the form `q₀ + Σ qᵢ·log2(nᵢ)`
//! with rational coefficients. Keeping that form symbolic lets identity
//! residuals cancel exactly instead of through floating-point subtraction.
//! Equality is decided after factoring every argument into primes, since the
//! base-2 logs of distinct odd primes are linearly independent over ℚ.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LogSum {
    constant: BigRational,
    /// argument → coefficient; arguments are > 1 and never a power of two
    logs: BTreeMap<u64, BigRational>,
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl LogSum {
    pub fn zero() -> Self {
        LogSum::default()
    }

    pub fn int(v: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn rational(v: BigRational) -> Self {
        LogSum {
            constant: v,
            logs: BTreeMap::new(),
        }
    }

    /// `log2(n)`, folded into the constant when `n` is a power of two.
    /// Panics on `n == 0`.
    pub fn log2(n: u64) -> Self {
        Self::log2_scaled(n, BigRational::one())
    }

    fn log2_scaled(n: u64, coeff: BigRational) -> Self {
        assert!(n > 0, "log2(0) is undefined");
        let mut out = LogSum::zero();
        if n.is_power_of_two() {
            out.constant = coeff * BigRational::from_integer(BigInt::from(n.trailing_zeros()));
        } else if !coeff.is_zero() {
            out.logs.insert(n, coeff);
        }
        out
    }

    pub fn constant(&self) -> &BigRational {
        &self.constant
    }

    pub fn is_rational(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn scale(&self, k: &BigRational) -> LogSum {
        let mut out = LogSum {
            constant: &self.constant * k,
            logs: BTreeMap::new(),
        };
        for (&n, c) in &self.logs {
            let c = c * k;
            if !c.is_zero() {
                out.logs.insert(n, c);
            }
        }
        out
    }

    /// Rewrites every log term over primes; two values are equal iff their
    /// normal forms are identical.
    pub fn normalized(&self) -> LogSum {
        let mut out = LogSum::rational(self.constant.clone());
        for (&n, c) in &self.logs {
            for (p, e) in factor(n) {
                let term = c * BigRational::from_integer(BigInt::from(e));
                if p == 2 {
                    out.constant += term;
                } else {
                    let slot = out.logs.entry(p).or_insert_with(BigRational::zero);
                    *slot += term;
                }
            }
        }
        out.logs.retain(|_, c| !c.is_zero());
        out
    }

    pub fn is_zero(&self) -> bool {
        let n = self.normalized();
        n.constant.is_zero() && n.logs.is_empty()
    }

    pub fn exact_eq(&self, other: &LogSum) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = self.constant.to_f64().unwrap_or(f64::NAN);
        for (&n, c) in &self.logs {
            v += c.to_f64().unwrap_or(f64::NAN) * (n as f64).log2();
        }
        v
    }

    /// Total order: exact equality first, otherwise by numeric value.
    pub fn exact_cmp(&self, other: &LogSum) -> Ordering {
        let diff = self.clone() - other.clone();
        let diff = diff.normalized();
        if diff.constant.is_zero() && diff.logs.is_empty() {
            return Ordering::Equal;
        }
        if diff.logs.is_empty() {
            return if diff.constant.is_positive() {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        diff.to_f64().partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl Add for LogSum {
    type Output = LogSum;

    fn add(mut self, rhs: LogSum) -> LogSum {
        self.constant += rhs.constant;
        for (n, c) in rhs.logs {
            let slot = self.logs.entry(n).or_insert_with(BigRational::zero);
            *slot += c;
        }
        self.logs.retain(|_, c| !c.is_zero());
        self
    }
}

impl Neg for LogSum {
    type Output = LogSum;

    fn neg(self) -> LogSum {
        self.scale(&-BigRational::one())
    }
}

impl Sub for LogSum {
    type Output = LogSum;

    fn sub(self, rhs: LogSum) -> LogSum {
        self + (-rhs)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for LogSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(bool, String)> = Vec::new();
        for (&n, c) in &self.logs {
            let mag = c.abs();
            let body = if mag.is_one() {
                format!("log2({n})")
            } else {
                format!("{}*log2({n})", fmt_rational(&mag))
            };
            terms.push((c.is_negative(), body));
        }
        if !self.constant.is_zero() || terms.is_empty() {
            terms.push((
                self.constant.is_negative(),
                fmt_rational(&self.constant.abs()),
            ));
        }
        for (i, (neg, body)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// Parses `"num/den"` or an integer.
pub fn parse_ratio(s: &str) -> Result<BigRational, Error> {
    parse_rational(s)
}

pub fn fmt_ratio(r: &BigRational) -> String {
    fmt_rational(r)
}

impl FromStr for LogSum {
    type Err = Error;

    /// Accepts the [`Display`](fmt::Display) form, e.g. `"3 + log2(5)"`,
    /// `"-2*log2(3) + 1/2"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty quantity".into()));
        }
        let mut out = LogSum::zero();
        let mut rest = s;
        let mut sign = BigRational::one();
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
        }
        loop {
            let (term, next) = match (rest.find(" + "), rest.find(" - ")) {
                (Some(a), Some(b)) if a < b => (&rest[..a], Some((&rest[a + 3..], false))),
                (_, Some(b)) => (&rest[..b], Some((&rest[b + 3..], true))),
                (Some(a), None) => (&rest[..a], Some((&rest[a + 3..], false))),
                (None, None) => (rest, None),
            };
            let term = term.trim();
            let value = if let Some(idx) = term.find("log2(") {
                let coeff = match term[..idx].trim_end_matches('*').trim() {
                    "" => BigRational::one(),
                    c => parse_rational(c)?,
                };
                let arg = term[idx + 5..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("bad log term {term:?}")))?;
                let n: u64 = arg
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad log argument {arg:?}")))?;
                if n == 0 {
                    return Err(Error::Parse("log2(0)".into()));
                }
                LogSum::log2_scaled(n, coeff)
            } else {
                LogSum::rational(parse_rational(term)?)
            };
            out = out + value.scale(&sign);
            match next {
                Some((r, neg)) => {
                    rest = r;
                    sign = if neg { -BigRational::one() } else { BigRational::one() };
                }
                None => break,
            }
        }
        Ok(out)
    }
}

/// An extended code length: finite, `+∞` (nothing found / not a member), or
/// undefined (an expression that touched `∞`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    Finite(LogSum),
    Infinite,
    Undefined,
}

impl Quantity {
    pub fn int(v: i64) -> Self {
        Quantity::Finite(LogSum::int(v))
    }

    pub fn log2(n: u64) -> Self {
        Quantity::Finite(LogSum::log2(n))
    }

    pub fn finite(&self) -> Option<&LogSum> {
        match self {
            Quantity::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Quantity::Finite(_))
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Quantity::Finite(v) if v.is_zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Quantity::Finite(v) => v.to_f64(),
            Quantity::Infinite => f64::INFINITY,
            Quantity::Undefined => f64::NAN,
        }
    }

    /// Order for minimisation: finite values by magnitude, then `∞`.
    /// Undefined sorts last.
    pub fn min_cmp(&self, other: &Quantity) -> Ordering {
        use Quantity::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.exact_cmp(b),
            (Finite(_), _) => Ordering::Less,
            (_, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) | (Undefined, Undefined) => Ordering::Equal,
            (Infinite, Undefined) => Ordering::Less,
            (Undefined, Infinite) => Ordering::Greater,
        }
    }

    /// `self ≤ bound`, treating `∞ ≤ ∞` as true.
    pub fn le(&self, bound: &Quantity) -> bool {
        match (self, bound) {
            (Quantity::Undefined, _) | (_, Quantity::Undefined) => false,
            _ => self.min_cmp(bound) != Ordering::Greater,
        }
    }
}

impl Add for Quantity {
    type Output = Quantity;

    fn add(self, rhs: Quantity) -> Quantity {
        match (self, rhs) {
            (Quantity::Finite(a), Quantity::Finite(b)) => Quantity::Finite(a + b),
            _ => Quantity::Undefined,
        }
    }
}

impl Sub for Quantity {
    type Output = Quantity;

    fn sub(self, rhs: Quantity) -> Quantity {
        match (self, rhs) {
            (Quantity::Finite(a), Quantity::Finite(b)) => Quantity::Finite(a - b),
            _ => Quantity::Undefined,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Finite(v) => v.fmt(f),
            Quantity::Infinite => f.write_str("inf"),
            Quantity::Undefined => f.write_str("undefined"),
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" => Ok(Quantity::Infinite),
            "undefined" => Ok(Quantity::Undefined),
            other => other.parse().map(Quantity::Finite),
        }
    }
}

/// Serialized as `{"exact": "...", "approx": f64 | null}`.
impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Quantity", 2)?;
        st.serialize_field("exact", &self.to_string())?;
        let approx = self.to_f64();
        st.serialize_field("approx", &approx.is_finite().then_some(approx))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two_fold_into_constant() {
        assert_eq!(LogSum::log2(8), LogSum::int(3));
        assert_eq!(LogSum::log2(1), LogSum::int(0));
    }

    #[test]
    fn prime_normalisation_decides_equality() {
        let a = LogSum::log2(9);
        let b = LogSum::log2(3) + LogSum::log2(3);
        assert!(a.exact_eq(&b));
        assert!((LogSum::log2(12) - LogSum::log2(3) - LogSum::int(2)).is_zero());
        assert!(!(LogSum::log2(3) - LogSum::log2(5)).is_zero());
    }

    #[test]
    fn display_and_parse_round_trip() {
        let v = LogSum::log2(9) - LogSum::int(6);
        assert_eq!(v.to_string(), "log2(9) - 6");
        assert_eq!("log2(9) - 6".parse::<LogSum>().unwrap(), v);
        let w = LogSum::rational(ratio(-1, 2)) + LogSum::log2(3).scale(&ratio(-2, 1));
        assert_eq!(w.to_string(), "-2*log2(3) - 1/2");
        assert_eq!(w.to_string().parse::<LogSum>().unwrap(), w);
        assert_eq!("7".parse::<LogSum>().unwrap(), LogSum::int(7));
        assert_eq!("inf".parse::<Quantity>().unwrap(), Quantity::Infinite);
    }

    #[test]
    fn ordering() {
        assert_eq!(LogSum::log2(3).exact_cmp(&LogSum::int(2)), Ordering::Less);
        assert_eq!(LogSum::log2(5).exact_cmp(&LogSum::int(2)), Ordering::Greater);
        assert_eq!(Quantity::int(5).min_cmp(&Quantity::Infinite), Ordering::Less);
        assert!(Quantity::Infinite.le(&Quantity::Infinite));
        assert!(!Quantity::Infinite.le(&Quantity::int(3)));
    }

    #[test]
    fn infinity_makes_expressions_undefined() {
        assert_eq!(Quantity::int(3) - Quantity::Infinite, Quantity::Undefined);
        assert_eq!(Quantity::Infinite + Quantity::Infinite, Quantity::Undefined);
        assert!((Quantity::int(3) - Quantity::int(3)).is_exact_zero());
    }
}
