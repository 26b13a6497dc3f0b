//! Players: sets of fixed-length bit strings.

mod games;

use std::collections::BTreeSet;
use std::fmt;

pub use games::{
    nash_players, rps_codec, rps_fixture, GameCodec, NondetStrategy, NormalFormGame, Side,
};

use crate::bits::BitString;
use crate::encoding::encode_set;
use crate::error::{Error, Result};

/// Lengths up to this use a dense bitmap over `{0,1}^n` (2 MiB at worst).
pub const DENSE_MAX_N: usize = 24;

#[derive(Clone, Debug)]
enum Members {
    /// bit `i` set ⇔ the `n`-bit numeral of `i` is a member
    Dense(Vec<u64>),
    Sparse(BTreeSet<BitString>),
}

/// A set of `n`-bit strings. Empty players are allowed.
#[derive(Clone, Debug)]
pub struct Player {
    n: usize,
    members: Members,
}

impl Player {
    /// Builds a player, choosing the dense backend when `n ≤ 24`.
    pub fn new<I: IntoIterator<Item = BitString>>(n: usize, members: I) -> Result<Self> {
        if n <= DENSE_MAX_N {
            Self::dense(n, members)
        } else {
            Self::sparse(n, members)
        }
    }

    pub fn dense<I: IntoIterator<Item = BitString>>(n: usize, members: I) -> Result<Self> {
        if n > DENSE_MAX_N {
            return Err(Error::ScaleLimit(format!(
                "dense players need n <= {DENSE_MAX_N}, got {n}"
            )));
        }
        let mut words = vec![0u64; (1usize << n).div_ceil(64)];
        for m in members {
            check_len(n, &m)?;
            let i = m.to_uint().unwrap_or(0) as usize;
            words[i / 64] |= 1 << (i % 64);
        }
        Ok(Player {
            n,
            members: Members::Dense(words),
        })
    }

    pub fn sparse<I: IntoIterator<Item = BitString>>(n: usize, members: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for m in members {
            check_len(n, &m)?;
            set.insert(m);
        }
        Ok(Player {
            n,
            members: Members::Sparse(set),
        })
    }

    pub fn empty(n: usize) -> Self {
        Player::new(n, std::iter::empty()).expect("empty player")
    }

    /// All of `{0,1}^n`.
    pub fn full(n: usize) -> Result<Self> {
        if n > DENSE_MAX_N {
            return Err(Error::ScaleLimit(format!("full player over {n} bits")));
        }
        Player::new(n, (0..1u64 << n).map(|i| BitString::from_uint(i, n)))
    }

    pub fn from_strs(n: usize, members: &[&str]) -> Result<Self> {
        let parsed = members
            .iter()
            .map(|s| s.parse::<BitString>())
            .collect::<Result<Vec<_>>>()?;
        Player::new(n, parsed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.members, Members::Dense(_))
    }

    /// Cardinality `|A|`.
    pub fn len(&self) -> usize {
        match &self.members {
            Members::Dense(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
            Members::Sparse(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The capacity of a player, `log 2^{|A|} = |A|`.
    pub fn capacity(&self) -> usize {
        self.len()
    }

    pub fn contains(&self, x: &BitString) -> bool {
        if x.len() != self.n {
            return false;
        }
        match &self.members {
            Members::Dense(w) => {
                let i = x.to_uint().unwrap_or(0) as usize;
                w[i / 64] >> (i % 64) & 1 == 1
            }
            Members::Sparse(s) => s.contains(x),
        }
    }

    /// Members in canonical (lexicographic, since lengths agree) order.
    pub fn members(&self) -> Vec<BitString> {
        match &self.members {
            Members::Dense(w) => {
                let mut out = Vec::new();
                for (wi, &word) in w.iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        out.push(BitString::from_uint((wi * 64 + b) as u64, self.n));
                        bits &= bits - 1;
                    }
                }
                out
            }
            Members::Sparse(s) => s.iter().cloned().collect(),
        }
    }

    pub fn first(&self) -> Option<BitString> {
        self.members().into_iter().next()
    }

    /// Exact set intersection. Lengths must agree.
    pub fn intersect(&self, other: &Player) -> Result<Player> {
        self.check_same_n(other)?;
        match (&self.members, &other.members) {
            (Members::Dense(a), Members::Dense(b)) => Ok(Player {
                n: self.n,
                members: Members::Dense(a.iter().zip(b).map(|(x, y)| x & y).collect()),
            }),
            _ => {
                let (small, big) = if self.len() <= other.len() {
                    (self, other)
                } else {
                    (other, self)
                };
                let common = small.members().into_iter().filter(|x| big.contains(x));
                if self.is_dense() {
                    Player::dense(self.n, common)
                } else {
                    Player::sparse(self.n, common)
                }
            }
        }
    }

    /// `|A ∩ B| > 0`.
    pub fn interacts(&self, other: &Player) -> Result<bool> {
        Ok(!self.intersect(other)?.is_empty())
    }

    pub fn is_subset(&self, other: &Player) -> bool {
        self.n == other.n && self.members().iter().all(|x| other.contains(x))
    }

    /// Canonical set listing of the members.
    pub fn encode(&self) -> BitString {
        encode_set(self.members().iter())
    }

    fn check_same_n(&self, other: &Player) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    /// Text form: `n=<int>` then one member per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for m in self.members() {
            s.push_str(&m.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Player> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("player text is empty".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad player header {header:?}")))?;
        let members = lines.map(str::parse).collect::<Result<Vec<BitString>>>()?;
        Player::new(n, members)
    }
}

fn check_len(n: usize, x: &BitString) -> Result<()> {
    if x.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: x.len(),
        });
    }
    Ok(())
}

impl PartialEq for Player {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.members() == other.members()
    }
}

impl Eq for Player {}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.members().iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}}", members.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use proptest::prelude::*;

    #[test]
    fn basic_algebra() {
        let a = Player::from_strs(2, &["00", "01", "11"]).unwrap();
        assert_eq!(a.intersect(&a).unwrap(), a);
        let x = Player::from_strs(2, &["00"]).unwrap();
        let y = Player::from_strs(2, &["11"]).unwrap();
        assert!(x.intersect(&y).unwrap().is_empty());
        assert!(!x.interacts(&y).unwrap());
        assert_eq!(Player::empty(3).capacity(), 0);
        assert_eq!(Player::full(4).unwrap().capacity(), 16);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let a = Player::from_strs(2, &["00"]).unwrap();
        let b = Player::from_strs(3, &["000"]).unwrap();
        assert!(matches!(a.intersect(&b), Err(Error::LengthMismatch { .. })));
        assert!(Player::from_strs(2, &["0"]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let a = Player::from_strs(3, &["101", "000"]).unwrap();
        assert_eq!(a.to_text(), "n=3\n000\n101\n");
        assert_eq!(Player::from_text(&a.to_text()).unwrap(), a);
        assert!(Player::from_text("m=3\n").is_err());
    }

    #[test]
    fn large_n_uses_sorted_list() {
        let x = BitString::from_uint(5, 30);
        let a = Player::new(30, [x.clone()]).unwrap();
        assert!(!a.is_dense());
        assert!(a.contains(&x));
        assert!(!a.contains(&bs("0")));
    }

    fn arb_player(n: usize) -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0..(1u64 << n), 0..20)
    }

    fn build(n: usize, idx: &[u64], dense: bool) -> Player {
        let it = idx.iter().map(|&i| BitString::from_uint(i, n));
        if dense {
            Player::dense(n, it).unwrap()
        } else {
            Player::sparse(n, it).unwrap()
        }
    }

    proptest! {
        #[test]
        fn backends_agree_and_algebra_holds(a in arb_player(6), b in arb_player(6), c in arb_player(6)) {
            let (da, db, dc) = (build(6, &a, true), build(6, &b, true), build(6, &c, true));
            let (sa, sb) = (build(6, &a, false), build(6, &b, false));
            let dab = da.intersect(&db).unwrap();
            prop_assert_eq!(&dab, &sa.intersect(&sb).unwrap());
            prop_assert_eq!(&dab, &da.intersect(&sb).unwrap());
            prop_assert_eq!(&dab, &db.intersect(&da).unwrap());
            prop_assert_eq!(
                dab.intersect(&dc).unwrap(),
                da.intersect(&db.intersect(&dc).unwrap()).unwrap()
            );
            prop_assert!(dab.len() <= da.len().min(db.len()));
            prop_assert!(dab.is_subset(&da) && dab.is_subset(&db));
            prop_assert_eq!(da.encode(), sa.encode());
        }
    }
}
